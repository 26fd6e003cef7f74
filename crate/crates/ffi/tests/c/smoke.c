#include <stdio.h>
#include <string.h>

#include "cubeset.h"

#define CHECK(cond)                                               \
    do {                                                          \
        if (!(cond)) {                                            \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                             \
        }                                                         \
    } while (0)

int main(void) {
    CubesetGraph *g = NULL;
    CHECK(cubeset_hypercube(4, &g) == CUBESET_STATUS_OK);

    uint32_t a[] = {0};
    uint32_t out[16];
    size_t len = 0;
    CHECK(cubeset_neighborhood(g, a, 1, out, 16, &len) == CUBESET_STATUS_OK);
    CHECK(len == 4 && out[0] == 1 && out[3] == 8);
    CHECK(cubeset_closure(g, a, 1, out, 16, &len) == CUBESET_STATUS_OK);
    CHECK(len == 1 && out[0] == 0);

    char *s = NULL;
    CHECK(cubeset_count(4, CUBESET_COUNT_METHOD_BRANCH, false, &s) == CUBESET_STATUS_OK);
    CHECK(strcmp(s, "743") == 0);
    cubeset_string_free(s);

    CHECK(cubeset_containers_json(g, 1, 4, 1, 3, 0, &s) == CUBESET_STATUS_OK);
    CHECK(strstr(s, "\"passed\":true") != NULL);
    cubeset_string_free(s);

    CubesetGraph *bad = NULL;
    CHECK(cubeset_graph_parse("bipartite 2 2\n", &bad) == CUBESET_STATUS_PARSE);
    CHECK(bad == NULL);
    CHECK(cubeset_last_error() != NULL);

    cubeset_graph_free(g);
    puts("ok");
    return 0;
}
