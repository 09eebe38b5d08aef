//! Abstract syntax, concrete grammars and purely syntactic operations for
//! the modal family (ML, GML, ML• and its bimodal quasi-syntax), relation
//! algebra terms, and three-variable first-order formulas.

mod fo;
mod lexer;
mod modal;
mod ra;

use std::collections::{BTreeMap, BTreeSet};

pub use fo::{parse_fo, FoFormula, Guard, Var};
pub use modal::{parse_modal, ModalFormula, ModalFragment, PrintStyle};
pub use ra::{parse_ra, RaTerm};

use crate::error::{Error, Result};

/// The predicate names occurring in a formula, split by arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub unary: BTreeSet<String>,
    pub binary: BTreeSet<String>,
}

impl Vocabulary {
    pub fn unary<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Vocabulary { unary: names.into_iter().map(Into::into).collect(), binary: BTreeSet::new() }
    }

    pub fn union(mut self, other: &Vocabulary) -> Vocabulary {
        self.unary.extend(other.unary.iter().cloned());
        self.binary.extend(other.binary.iter().cloned());
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.unary.contains(name) || self.binary.contains(name)
    }
}

/// An arity-preserving renaming of predicate names. Names without an entry
/// are left unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    pub unary: BTreeMap<String, String>,
    pub binary: BTreeMap<String, String>,
}

impl Renaming {
    pub fn unary_name<'a>(&'a self, name: &'a str) -> &'a str {
        self.unary.get(name).map_or(name, String::as_str)
    }

    pub fn binary_name<'a>(&'a self, name: &'a str) -> &'a str {
        self.binary.get(name).map_or(name, String::as_str)
    }

    /// The inverse renaming, when this one is injective.
    pub fn inverse(&self) -> Option<Renaming> {
        let invert = |m: &BTreeMap<String, String>| {
            let inv: BTreeMap<String, String> = m.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
            (inv.len() == m.len()).then_some(inv)
        };
        Some(Renaming { unary: invert(&self.unary)?, binary: invert(&self.binary)? })
    }

    /// Rejects renamings that would send a name across arities for a formula
    /// with vocabulary `vocab`.
    pub fn check(&self, vocab: &Vocabulary) -> Result<()> {
        if let Some(k) = self.unary.keys().find(|k| vocab.binary.contains(*k)) {
            return Err(Error::precondition(format!("{k:?} is binary in the formula but renamed as unary")));
        }
        if let Some(k) = self.binary.keys().find(|k| vocab.unary.contains(*k)) {
            return Err(Error::precondition(format!("{k:?} is unary in the formula but renamed as binary")));
        }
        let unary: BTreeSet<&str> = vocab.unary.iter().map(|n| self.unary_name(n)).collect();
        let binary: BTreeSet<&str> = vocab.binary.iter().map(|n| self.binary_name(n)).collect();
        if let Some(clash) = unary.intersection(&binary).next() {
            return Err(Error::precondition(format!("renaming makes {clash:?} both unary and binary")));
        }
        Ok(())
    }
}

/// Operations shared by all three formula languages.
pub trait Formula: Sized {
    /// Exactly the predicate names occurring in the formula.
    fn vocabulary(&self) -> Vocabulary;

    /// Applies the renaming without checking arities.
    fn rename_unchecked(&self, r: &Renaming) -> Self;

    fn rename(&self, r: &Renaming) -> Result<Self> {
        r.check(&self.vocabulary())?;
        Ok(self.rename_unchecked(r))
    }
}

pub fn vocabulary_of<F: Formula>(f: &F) -> Vocabulary {
    f.vocabulary()
}

pub fn rename<F: Formula>(f: &F, r: &Renaming) -> Result<F> {
    f.rename(r)
}
