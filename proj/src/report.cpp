#include "persuade/report.hpp"

#include <fmt/format.h>

#include "persuade/oracle.hpp"

namespace persuade::harness {

namespace {

const char* regime_name(oracle::Regime r) {
  switch (r) {
    case oracle::Regime::BelowThreshold:
      return "below_threshold";
    case oracle::Regime::AboveThreshold:
      return "above_threshold";
    case oracle::Regime::AtThreshold:
      return "at_threshold";
  }
  return "unknown";
}

}  // namespace

std::string contract_report(const ValueMatrix& vm, double c) {
  const auto opt = oracle::optimal_contract(vm, c);
  return fmt::format("p_min={:.6f}\np*={:.6f}\nc_hat={:.6f}\nc={:.6f}\nregime={}\np_opt={:.6f}\n",
                     oracle::compute_p_min(vm), oracle::compute_p_star(vm), opt.c_hat, c,
                     regime_name(opt.regime), opt.p_star);
}

std::string letter_report(double p0) {
  const auto best = oracle::letter_optimal_policy(p0);
  const auto vm = oracle::letter_value_matrix(p0);
  return fmt::format("p0={:.6f}\np_min={:.6f}\np*={:.6f}\nc_hat={:.6f}\np1*={:.6f}\np2*={:.6f}\n"
                     "u_prof={:.6f}\n",
                     p0, oracle::compute_p_min(vm), oracle::compute_p_star(vm),
                     oracle::compute_c_hat(vm), best.policy.p1(), best.policy.p2(),
                     best.u_prof_star);
}

}  // namespace persuade::harness
