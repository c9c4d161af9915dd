/*
 * medsel_minmax.c
 *
 * Triplex sensor voter, selection by comparison only.
 */
#include <math.h>

typedef float real32_T;

typedef struct {
  real32_T ia;
  real32_T ib;
  real32_T ic;
} ExtU;

typedef struct {
  real32_T sel_val;
} ExtY;

typedef struct {
  real32_T Delay1_DSTATE[3];
} DW;

ExtU rtU;
ExtY rtY;
DW rtDW;

static const real32_T rtP_miscompare = 10.0F;

void medsel_step(void)
{
  real32_T lo;
  real32_T hi;

  lo = fminf(rtU.ia, rtU.ib);
  hi = fmaxf(rtU.ia, rtU.ib);
  rtY.sel_val = fmaxf(lo, fminf(hi, rtU.ic));

  if (fabsf(rtU.ia - rtY.sel_val) > rtP_miscompare) {
    rtDW.Delay1_DSTATE[0] = 1.0F;
  }
  if (fabsf(rtU.ib - rtY.sel_val) > rtP_miscompare) {
    rtDW.Delay1_DSTATE[1] = 1.0F;
  }
  if (fabsf(rtU.ic - rtY.sel_val) > rtP_miscompare) {
    rtDW.Delay1_DSTATE[2] = 1.0F;
  }
}

void medsel_initialize(void)
{
  rtDW.Delay1_DSTATE[0] = 0.0F;
  rtDW.Delay1_DSTATE[1] = 0.0F;
  rtDW.Delay1_DSTATE[2] = 0.0F;
}
