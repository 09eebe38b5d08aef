#include <stdio.h>
#include <string.h>

#include "logicwb.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);   \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    const char *doc = "{\"domain\":[\"w0\",\"w1\"],\"unary\":{\"p\":[\"w1\"]},"
                      "\"binary\":{\"R\":[[\"w0\",\"w1\"]]}}";
    LwbStructure *m = NULL;
    CHECK(lwb_structure_from_json(doc, &m) == LWB_STATUS_OK);

    bool value = false;
    CHECK(lwb_eval_modal(m, "w0", "<>p", LWB_MODE_INTENDED, &value) == LWB_STATUS_OK);
    CHECK(value);

    CHECK(lwb_eval_modal(m, "w0", "<>(", LWB_MODE_INTENDED, &value) == LWB_STATUS_PARSE);
    CHECK(lwb_last_error_message() != NULL);

    char *pairs = NULL;
    CHECK(lwb_eval_ra(m, "R;R~", &pairs) == LWB_STATUS_OK);
    CHECK(strcmp(pairs, "[[\"w0\",\"w0\"]]") == 0);
    lwb_string_free(pairs);

    bool sat = true;
    CHECK(lwb_sat(LWB_LOGIC_ML, "p & ~p", &sat, NULL) == LWB_STATUS_OK);
    CHECK(!sat);

    lwb_structure_free(m);
    puts("ok");
    return 0;
}
