#pragma once

namespace pairlens {

// Standard normal CDF.
double normal_cdf(double z);

// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace pairlens
