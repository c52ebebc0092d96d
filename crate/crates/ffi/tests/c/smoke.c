#include <math.h>
#include <stdio.h>
#include <string.h>

#include "simplex_cone.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  const double tet[6] = {1, 1, 1, 1, 1, 1};
  ScSimplex *h = NULL;
  CHECK(sc_simplex_new(3, tet, 6, &h) == SC_STATUS_OK);
  CHECK(sc_simplex_dimension(h) == 3);

  ScValidity v;
  CHECK(sc_validate(h, 0.0, &v) == SC_STATUS_OK);
  CHECK(v.verdict == SC_VERDICT_VALID);
  CHECK(fabs(v.smallest_gram_eigenvalue - 0.5) < 1e-12);

  double vol = 0;
  CHECK(sc_volume(h, &vol) == SC_STATUS_OK);
  CHECK(fabs(vol - sqrt(2.0) / 12.0) < 1e-12);

  double gstar[16], areas[4];
  CHECK(sc_dual_gram(h, gstar, 16, areas, 4) == SC_STATUS_OK);
  CHECK(fabs(gstar[1] + 1.0 / 3.0) < 1e-12);
  CHECK(sc_dual_gram(h, gstar, 15, areas, 4) == SC_STATUS_BUFFER_TOO_SMALL);
  CHECK(sc_last_error() != NULL);

  const double bad[3] = {1, 1, 9};
  ScSimplex *b = NULL;
  CHECK(sc_simplex_new(2, bad, 3, &b) == SC_STATUS_OK);
  CHECK(sc_volume(b, &vol) == SC_STATUS_NOT_REALIZABLE);
  CHECK(strstr(sc_last_error(), "no Euclidean simplex") != NULL);

  sc_simplex_free(b);
  sc_simplex_free(h);
  printf("ok %s\n", sc_version());
  return 0;
}
