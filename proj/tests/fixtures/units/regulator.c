/*
 * regulator.c
 *
 * Code generated for model 'regulator'.
 *
 * Model version                  : 1.42
 * C source code generated on     : Tue Mar  4 10:12:33 2025
 * Target selection               : ert.tlc
 * Embedded hardware selection    : Intel->x86-64 (Linux 64)
 *
 * Five-loop regulator: each loop filters its measurement, forms the
 * error against the reference, applies PI action with clamping and
 * latches an alarm after persistent saturation.
 */
#include <math.h>

typedef double real_T;
typedef unsigned char boolean_T;
typedef int int32_T;

typedef struct {
  real_T ref0;
  real_T meas0;
  real_T ref1;
  real_T meas1;
  real_T ref2;
  real_T meas2;
  real_T ref3;
  real_T meas3;
  real_T ref4;
  real_T meas4;
  boolean_T enable;
} ExtU;

typedef struct {
  real_T act0;
  boolean_T alarm0;
  real_T act1;
  boolean_T alarm1;
  real_T act2;
  boolean_T alarm2;
  real_T act3;
  boolean_T alarm3;
  real_T act4;
  boolean_T alarm4;
} ExtY;

typedef struct {
  real_T Filter0_DSTATE;
  real_T Integrator0_DSTATE;
  int32_T Persist0_count;
  real_T Filter1_DSTATE;
  real_T Integrator1_DSTATE;
  int32_T Persist1_count;
  real_T Filter2_DSTATE;
  real_T Integrator2_DSTATE;
  int32_T Persist2_count;
  real_T Filter3_DSTATE;
  real_T Integrator3_DSTATE;
  int32_T Persist3_count;
  real_T Filter4_DSTATE;
  real_T Integrator4_DSTATE;
  int32_T Persist4_count;
} DW;

ExtU rtU;
ExtY rtY;
DW rtDW;

static const real_T rtP_alpha = 0.25;
static const real_T rtP_kp = 1.5;
static const real_T rtP_ki = 0.02;
static const real_T rtP_limit = 100.0;
static const int32_T rtP_persist = 20;

/* Loop 0: filter, PI, clamp, persistence */
static void regulator_loop0(void)
{
  real_T filt;
  real_T err;
  real_T u;

  filt = rtDW.Filter0_DSTATE + rtP_alpha * (rtU.meas0 - rtDW.Filter0_DSTATE);
  rtDW.Filter0_DSTATE = filt;
  err = rtU.ref0 - filt;
  u = rtP_kp * err + rtDW.Integrator0_DSTATE;
  if (u > rtP_limit) {
    u = rtP_limit;
    rtDW.Persist0_count++;
  } else if (u < -rtP_limit) {
    u = -rtP_limit;
    rtDW.Persist0_count++;
  } else {
    rtDW.Integrator0_DSTATE += rtP_ki * err;
    rtDW.Persist0_count = 0;
  }
  rtY.act0 = u;
  if (rtDW.Persist0_count >= rtP_persist) {
    rtY.alarm0 = 1;
  }
}

/* Loop 1: filter, PI, clamp, persistence */
static void regulator_loop1(void)
{
  real_T filt;
  real_T err;
  real_T u;

  filt = rtDW.Filter1_DSTATE + rtP_alpha * (rtU.meas1 - rtDW.Filter1_DSTATE);
  rtDW.Filter1_DSTATE = filt;
  err = rtU.ref1 - filt;
  u = rtP_kp * err + rtDW.Integrator1_DSTATE;
  if (u > rtP_limit) {
    u = rtP_limit;
    rtDW.Persist1_count++;
  } else if (u < -rtP_limit) {
    u = -rtP_limit;
    rtDW.Persist1_count++;
  } else {
    rtDW.Integrator1_DSTATE += rtP_ki * err;
    rtDW.Persist1_count = 0;
  }
  rtY.act1 = u;
  if (rtDW.Persist1_count >= rtP_persist) {
    rtY.alarm1 = 1;
  }
}

/* Loop 2: filter, PI, clamp, persistence */
static void regulator_loop2(void)
{
  real_T filt;
  real_T err;
  real_T u;

  filt = rtDW.Filter2_DSTATE + rtP_alpha * (rtU.meas2 - rtDW.Filter2_DSTATE);
  rtDW.Filter2_DSTATE = filt;
  err = rtU.ref2 - filt;
  u = rtP_kp * err + rtDW.Integrator2_DSTATE;
  if (u > rtP_limit) {
    u = rtP_limit;
    rtDW.Persist2_count++;
  } else if (u < -rtP_limit) {
    u = -rtP_limit;
    rtDW.Persist2_count++;
  } else {
    rtDW.Integrator2_DSTATE += rtP_ki * err;
    rtDW.Persist2_count = 0;
  }
  rtY.act2 = u;
  if (rtDW.Persist2_count >= rtP_persist) {
    rtY.alarm2 = 1;
  }
}

/* Loop 3: filter, PI, clamp, persistence */
static void regulator_loop3(void)
{
  real_T filt;
  real_T err;
  real_T u;

  filt = rtDW.Filter3_DSTATE + rtP_alpha * (rtU.meas3 - rtDW.Filter3_DSTATE);
  rtDW.Filter3_DSTATE = filt;
  err = rtU.ref3 - filt;
  u = rtP_kp * err + rtDW.Integrator3_DSTATE;
  if (u > rtP_limit) {
    u = rtP_limit;
    rtDW.Persist3_count++;
  } else if (u < -rtP_limit) {
    u = -rtP_limit;
    rtDW.Persist3_count++;
  } else {
    rtDW.Integrator3_DSTATE += rtP_ki * err;
    rtDW.Persist3_count = 0;
  }
  rtY.act3 = u;
  if (rtDW.Persist3_count >= rtP_persist) {
    rtY.alarm3 = 1;
  }
}

/* Loop 4: filter, PI, clamp, persistence */
static void regulator_loop4(void)
{
  real_T filt;
  real_T err;
  real_T u;

  filt = rtDW.Filter4_DSTATE + rtP_alpha * (rtU.meas4 - rtDW.Filter4_DSTATE);
  rtDW.Filter4_DSTATE = filt;
  err = rtU.ref4 - filt;
  u = rtP_kp * err + rtDW.Integrator4_DSTATE;
  if (u > rtP_limit) {
    u = rtP_limit;
    rtDW.Persist4_count++;
  } else if (u < -rtP_limit) {
    u = -rtP_limit;
    rtDW.Persist4_count++;
  } else {
    rtDW.Integrator4_DSTATE += rtP_ki * err;
    rtDW.Persist4_count = 0;
  }
  rtY.act4 = u;
  if (rtDW.Persist4_count >= rtP_persist) {
    rtY.alarm4 = 1;
  }
}

void regulator_step(void)
{
  if (!rtU.enable) {
    rtY.act0 = 0.0;
    rtY.act1 = 0.0;
    rtY.act2 = 0.0;
    rtY.act3 = 0.0;
    rtY.act4 = 0.0;
    return;
  }
  regulator_loop0();
  regulator_loop1();
  regulator_loop2();
  regulator_loop3();
  regulator_loop4();
}

void regulator_initialize(void)
{
  rtDW.Filter0_DSTATE = 0.0;
  rtDW.Integrator0_DSTATE = 0.0;
  rtDW.Persist0_count = 0;
  rtY.alarm0 = 0;
  rtDW.Filter1_DSTATE = 0.0;
  rtDW.Integrator1_DSTATE = 0.0;
  rtDW.Persist1_count = 0;
  rtY.alarm1 = 0;
  rtDW.Filter2_DSTATE = 0.0;
  rtDW.Integrator2_DSTATE = 0.0;
  rtDW.Persist2_count = 0;
  rtY.alarm2 = 0;
  rtDW.Filter3_DSTATE = 0.0;
  rtDW.Integrator3_DSTATE = 0.0;
  rtDW.Persist3_count = 0;
  rtY.alarm3 = 0;
  rtDW.Filter4_DSTATE = 0.0;
  rtDW.Integrator4_DSTATE = 0.0;
  rtDW.Persist4_count = 0;
  rtY.alarm4 = 0;
}
/* [EOF] regulator.c */
