use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(u32),
    LParen,
    RParen,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Minus,
    Semi,
    Diamond,
    BoxOp,
    DotDiamond,
    DotBox,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Star,
    Hash,
    Colon,
    Dot,
    Comma,
    Equals,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Nat(n) => format!("number {n}"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Tilde => "~",
                    Tok::Amp => "&",
                    Tok::Bar => "|",
                    Tok::Arrow => "->",
                    Tok::Minus => "-",
                    Tok::Semi => ";",
                    Tok::Diamond => "<>",
                    Tok::BoxOp => "[]",
                    Tok::DotDiamond => "<.>",
                    Tok::DotBox => "[.]",
                    Tok::LAngle => "<",
                    Tok::RAngle => ">",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Star => "*",
                    Tok::Hash => "#",
                    Tok::Colon => ":",
                    Tok::Dot => ".",
                    Tok::Comma => ",",
                    Tok::Equals => "=",
                    Tok::Ident(_) | Tok::Nat(_) => unreachable!(),
                };
                format!("{s:?}")
            }
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == b'_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                .count();
            (Tok::Ident(rest[..len].to_string()), len)
        } else if c.is_ascii_digit() {
            let len = rest.bytes().take_while(u8::is_ascii_digit).count();
            let n = rest[..len]
                .parse()
                .map_err(|_| SyntaxError::new(start, "number out of range"))?;
            (Tok::Nat(n), len)
        } else if rest.starts_with("<.>") {
            (Tok::DotDiamond, 3)
        } else if rest.starts_with("[.]") {
            (Tok::DotBox, 3)
        } else if rest.starts_with("<>") {
            (Tok::Diamond, 2)
        } else if rest.starts_with("[]") {
            (Tok::BoxOp, 2)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else {
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'~' => Tok::Tilde,
                b'&' => Tok::Amp,
                b'|' => Tok::Bar,
                b'-' => Tok::Minus,
                b';' => Tok::Semi,
                b'<' => Tok::LAngle,
                b'>' => Tok::RAngle,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'*' => Tok::Star,
                b'#' => Tok::Hash,
                b':' => Tok::Colon,
                b'.' => Tok::Dot,
                b',' => Tok::Comma,
                b'=' => Tok::Equals,
                _ => {
                    let ch = rest.chars().next().unwrap();
                    return Err(SyntaxError::new(start, format!("unexpected character {ch:?}")));
                }
            };
            (tok, 1)
        };
        out.push((start, tok));
        i += len;
    }
    Ok(out)
}

/// Cursor over a token stream shared by the three recursive-descent parsers.
pub(crate) struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Cursor { toks: tokenize(text)?, pos: 0, end: text.len() })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => SyntaxError::new(self.offset(), format!("expected {wanted}, found {}", t.describe())),
            None => SyntaxError::new(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(SyntaxError::new(self.offset(), format!("trailing input starting at {}", t.describe()))),
        }
    }
}
