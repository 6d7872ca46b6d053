#include <stdio.h>
#include <string.h>
#include "lidomaug.h"

int main(int argc, char **argv) {
    if (argc < 2) return 64;
    LdmSensor s;
    if (ldm_preset("V64", &s) != LDM_STATUS_OK || s.channels != 64) return 1;
    LdmWorld *w = NULL;
    if (ldm_world_open(argv[1], &w) != LDM_STATUS_OK) {
        fprintf(stderr, "%s\n", ldm_last_error());
        return 2;
    }
    const LdmWorld *ws[1] = { w };
    LdmAugmented *r = NULL;
    if (ldm_augment(ws, 1, "n_mix = 2\nsensor = 32 1024 0.1 -0.4 80 10\n", 42, &r) != LDM_STATUS_OK) {
        fprintf(stderr, "%s\n", ldm_last_error());
        return 3;
    }
    uint32_t h = 0, wd = 0;
    const float *range = ldm_augmented_range(r, &h, &wd);
    size_t n = ldm_augmented_len(r), valid = 0;
    for (size_t i = 0; i < (size_t)h * wd; i++) valid += range[i] > 0.0f;
    printf("version=%s h=%u w=%u points=%zu valid=%zu\n", ldm_version(), h, wd, n, valid);
    ldm_augmented_free(r);
    ldm_world_free(w);
    return (h == 32 && wd == 1024 && n == valid && n > 0) ? 0 : 4;
}
