#include <stdio.h>
#include "pfas_ffi.h"

int main(void) {
    PfasStack *stack = NULL;
    if (pfas_stack_from_preset("asap7", &stack) != PFAS_STATUS_OK) {
        fprintf(stderr, "%s\n", pfas_last_error_message());
        return 1;
    }
    PfasTotals t;
    pfas_stack_metrics(stack, NULL, &t);
    printf("PFAS layers %u (FEOL %u, MOL %u, BEOL %u), litho energy %g\n",
           t.total_pfas_layers, t.feol_pfas_layers, t.mol_pfas_layers, t.beol_pfas_layers, t.litho_energy);

    double chip = 0.0;
    if (pfas_chip_pfas(stack, NULL, 1.0, 1.5, &chip) != PFAS_STATUS_OK)
        printf("rejected: %s\n", pfas_last_error_message());

    pfas_stack_free(stack);
    return 0;
}
