#pragma once

#include <vector>

// Welch t-test reference values from scipy.stats.ttest_ind(a, b, equal_var=False)
// (scipy 1.15.3), two-sided and alternative='greater'. Frozen; regenerate only
// if the fixtures change.

namespace rageval::testing {

struct WelchFixture {
  std::vector<double> a;
  std::vector<double> b;
  double t;
  double df;
  double p_two_sided;
  double p_greater;
};

inline const std::vector<WelchFixture>& welch_fixtures() {
  static const std::vector<WelchFixture> fixtures = {
      {{2.1, 2.5, 2.3, 2.2},
       {1.1, 1.0, 1.2, 1.4},
       9.1088653833190794,
       6,
       9.8367801277840901e-05,
       4.9183900638920451e-05},
      {{0.91, 0.85, 0.99, 0.7, 1.0, 0.95},
       {0.5, 0.8, 0.3, 0.71, 0.66},
       3.0781115382977644,
       6.1026098114978149,
       0.021248139208903328,
       0.010624069604451664},
      {{1.0, 2.0, 3.0, 4.0, 5.0},
       {2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0},
       -2.809757434745082,
       8.0371057513914668,
       0.022747255279670916,
       0.98862637236016448},
      {{0.1, 0.2},
       {0.3, 0.5, 0.7},
       -2.7815179498365916,
       2.6350364963503652,
       0.079820692391280132,
       0.96008965380435995},
      {{0.258049, 1.003141, 0.781972, -1.597147, 2.313158, 0.871738, 0.327657, 0.03256, 1.038577, 1.814608},
       {1.902726, -2.040464, -2.182464, -2.98843, 0.86815, -0.997956, 0.541986, -1.024862, -4.3903, 0.125952, -2.47228, -2.804811},
       3.1198647376645048,
       17.947346416699833,
       0.0059320450918239906,
       0.0029660225459119953},
      {{-0.710072, 0.077806, 0.572845, 0.050788, 0.280227, 0.287792, -0.141173, -0.714664, -0.292888, 0.170253, -0.630391, -0.417628, -0.865335, 0.656474, -0.198348, -0.482283, 0.083028, -0.788088, 0.152794, -0.510331, 0.166463, -0.224213, -0.232385, -0.178005, 0.251816, -0.505585, -0.056464, 0.44206, -0.619296, 0.769787},
       {0.013189, -0.043719, 0.059533, -0.112697, 0.049132, 0.019422, -0.196921, -0.293796},
       -0.60988963535187024,
       35.642850322635788,
       0.54580382281541318,
       0.7270980885922933},
      {{3.67014, -5.150554, -0.101248, -4.854133, 5.660614},
       {-0.414925, -0.805223, -1.581632, 0.659446, 0.557646, -0.017587, -0.631411, 0.01129, -0.898102, 0.838192, 1.01631, 0.166278, 0.451644, 0.287628, 0.103287, -0.651549, -0.701536, 0.848931, -2.472517, -1.37274, 0.005933, 0.927381, 0.952002, 0.903103, 0.446612, 1.222173, -0.556068, -1.535256, -0.601098, -0.854972, 1.16637, 1.49363, 0.700195, 0.891609, -1.745353, 1.097409, -0.606349, 0.438067, -0.426882, 1.727908, -1.955756, 0.436854, -1.07182, -2.090637, -0.301317, -0.150862, -0.447441, -0.685446, -0.535653, -1.939648},
       -0.0004559919719292839,
       4.0349746712615229,
       0.99965782587854835,
       0.50017108706072588},
      {{-0.18082, 0.856883, -2.055335, 0.799087, 0.538922, -0.766121, 2.179694, -0.324179, -1.085211, 0.485415, 0.348166, 0.884554, 0.6604, 0.47082, -0.813228, 0.375813, -1.194108, -2.33971, -2.530471, 0.873441},
       {-0.953404, 0.732704, -0.340078, 0.247949, 1.104429, -1.56211, -0.201981, -1.224744, 1.36911, 1.217591, 0.778443, 0.893811, 0.239261, 0.322236, -0.740816, -1.45325, -0.495478, 0.218366, -1.105075, -0.621559},
       -0.18038077728890656,
       35.226021973647512,
       0.85788739084803867,
       0.57105630457598067},
      {{2.805813, 2.368795, 2.453833, 2.663167, 2.554744, 2.61031, 2.061641},
       {2.407828, 3.245365, 6.496836, 7.93916, -4.560017, 8.884153, 5.314972, -1.107253, -0.608568},
       -0.40343539527488448,
       8.0579783507286038,
       0.69712157912691552,
       0.65143921043654229},
      {{0.4236, 0.705377, 0.647529, -0.216664, -0.445065, -0.301056, -0.023258, 0.115995, -0.430797, -0.617733, -0.215086, 0.651047, 0.199367, 0.081056, 0.122336, 0.128625, -0.684952, -0.264241, -0.413205, -0.01725, -0.401757, 0.026815, -0.124623, 0.300969, 0.437911, 0.010498, -0.270321, -0.453193, 0.498199, 0.018371, -0.310726, -0.130441, 0.064018, 0.190707, 0.273003, 0.300535, 0.118566, 0.125359, -0.280636, 0.470553},
       {0.527736, 0.493135, 0.084238, -0.409262, -0.072296, -0.455557, 0.030151, -0.37607, -0.241942, -0.257712, -0.439465, 0.149936, 0.435484, -0.194777, -0.323375, -0.910981, -0.146013, 0.373047, -0.038754, 0.530436, 0.0089, -0.037369, -0.395999, 0.512198, 0.115142},
       0.5258444150099858,
       48.847104947072808,
       0.60137559545395791,
       0.30068779772697896},
  };
  return fixtures;
}

}  // namespace rageval::testing
