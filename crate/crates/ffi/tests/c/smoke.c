#include <math.h>
#include <stdio.h>
#include <string.h>
#include "lempert_lab.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        LlStatus s_ = (call);                                              \
        if (s_ != LL_STATUS_OK) {                                          \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_,              \
                    ll_last_error_message());                              \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    LlDomain *d = NULL;
    LlMap *m = NULL;
    double l, v[2], back[2];
    CHECK(ll_domain_from_json("{\"kind\": \"unit_disc\"}", &d));
    CHECK(ll_map_new(d, 0.0, 0.0, &m));
    CHECK(ll_lempert_planar(m, 0.0, 0.0, 0.5, 0.0, &l));
    if (fabs(l - 0.5) > 1e-12) return 2;
    CHECK(ll_map_forward(m, 0.3, 0.1, v, NULL));
    CHECK(ll_map_inverse(m, v[0], v[1], back));
    if (fabs(back[0] - 0.3) > 1e-12 || fabs(back[1] - 0.1) > 1e-12) return 3;
    if (ll_lempert_planar(m, 2.0, 0.0, 0.0, 0.0, &l) != LL_STATUS_OUTSIDE_DOMAIN) return 4;
    if (ll_last_error_message() == NULL) return 5;
    ll_map_free(m);
    ll_domain_free(d);
    printf("ok %s\n", ll_version());
    return 0;
}
