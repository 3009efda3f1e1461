#include "mprk/csv.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace mprk {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",y" << (i + 1);
  os << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) os << "," << format_double(traj.states[k][i]);
    os << "\n";
  }
}

}  // namespace mprk
