/* Reads a problem file, synthesizes and prints the verdict and controller.
 *
 *   cargo build -p golog-synth-ffi --release
 *   cc -Icrates/ffi/include crates/ffi/examples/smoke.c \
 *      -Ltarget/release -lgolog_synth_ffi -o smoke
 *   LD_LIBRARY_PATH=target/release ./smoke crates/core/tests/fixtures/camera_persistent.tgs
 */
#include <stdio.h>
#include <stdlib.h>

#include "golog_synth.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc((size_t)n + 1);
    if (buf && fread(buf, 1, (size_t)n, f) != (size_t)n) {
        free(buf);
        buf = NULL;
    }
    if (buf) buf[n] = '\0';
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s FILE.tgs\n", argv[0]);
        return 2;
    }
    char *src = slurp(argv[1]);
    if (!src) {
        perror(argv[1]);
        return 2;
    }
    GsProblem *problem = NULL;
    if (gs_problem_from_source(src, &problem) != GS_STATUS_OK) {
        fprintf(stderr, "error: %s\n", gs_last_error_message());
        free(src);
        return 2;
    }
    free(src);
    GsResult *result = NULL;
    if (gs_synthesize(problem, NULL, &result) != GS_STATUS_OK) {
        fprintf(stderr, "error: %s\n", gs_last_error_message());
        gs_problem_free(problem);
        return 3;
    }
    GsStats stats;
    gs_result_stats(result, &stats);
    int controllable = gs_result_verdict(result) == GS_VERDICT_CONTROLLABLE;
    printf("golog-synth %s: %s (%llu nodes expanded)\n", gs_version(),
           controllable ? "CONTROLLABLE" : "UNCONTROLLABLE", (unsigned long long)stats.nodes_expanded);
    char *text = controllable ? gs_result_controller_json(result) : gs_result_witness(result);
    printf("%s\n", text);
    gs_string_free(text);
    gs_result_free(result);
    gs_problem_free(problem);
    return controllable ? 0 : 1;
}
