/* Minimal C client: print thresholds, solve once, report the norm. */
#include <stdio.h>
#include "../include/sixwave.h"

int main(void) {
    SixwaveThresholds t;
    if (sixwave_thresholds(1.0, 1.0, 1e-8, &t) != SixwaveStatus_Ok) {
        char msg[256];
        sixwave_last_error_message(msg, sizeof msg);
        fprintf(stderr, "thresholds: %s\n", msg);
        return 1;
    }
    printf("r_e = %.6f, r_ks = %.6f\n", t.r_e, t.r_ks);

    SixwaveSolver *s = sixwave_solver_new(1.0, 1.0, 1e-8, 17, 17, 8,
                                          0.0, 1.0, 5, 1e-8, 30);
    if (!s) return 1;
    SixwaveField *f0 = sixwave_field_maxwellian(s, 0.02);
    SixwaveField *out = NULL;
    double residual = 0.0;
    if (sixwave_picard_solve(s, f0, &out, &residual) != SixwaveStatus_Ok) {
        char msg[256];
        sixwave_last_error_message(msg, sizeof msg);
        fprintf(stderr, "solve: %s\n", msg);
        return 1;
    }
    double norm = 0.0;
    sixwave_field_norm(s, out, &norm);
    printf("final residual %.3e, |f(T)| = %.6f\n", residual, norm);
    sixwave_field_free(out);
    sixwave_field_free(f0);
    sixwave_solver_free(s);
    return 0;
}
