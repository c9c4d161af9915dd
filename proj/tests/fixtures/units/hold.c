/*
 * hold.c
 *
 * Track-and-hold: the output follows the input while track is set and
 * keeps its last value otherwise.
 */
typedef double real_T;
typedef unsigned char boolean_T;

typedef struct {
  real_T u;
  boolean_T track;
} ExtU;

typedef struct {
  real_T y;
} ExtY;

typedef struct {
  real_T Memory_PreviousInput;
} DW;

ExtU rtU;
ExtY rtY;
DW rtDW;

void hold_step(void)
{
  if (rtU.track) {
    rtDW.Memory_PreviousInput = rtU.u;
  }
  rtY.y = rtDW.Memory_PreviousInput;
}

void hold_initialize(void)
{
  rtDW.Memory_PreviousInput = 0.0;
}
