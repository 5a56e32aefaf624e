#pragma once

// Deterministic CSV fixtures shaped like the case-study data sets: a
// 768-row diabetes-style file with two high-missingness columns plus a few
// incomplete rows elsewhere (724 complete rows after the drop protocol),
// and a 74 x 516 expression-style file.

#include <fstream>
#include <string>

#include "psun/rng.hpp"
#include "psun/special.hpp"

namespace fixtures {

inline void write_pima_like_csv(const std::string& path, int n_total = 768,
                                int incomplete_rows = 44) {
  psun::RngStream rng(4242);
  std::ofstream out(path);
  out << "pregnant,glucose,pressure,triceps,insulin,mass,pedigree,age,y\n";
  for (int i = 0; i < n_total; ++i) {
    const double pregnant = std::floor(rng.uniform() * 10);
    const double glucose = 120.0 + 30.0 * rng.normal();
    const double pressure = 70.0 + 12.0 * rng.normal();
    const double triceps = 29.0 + 10.0 * rng.normal();
    const double insulin = 150.0 + 80.0 * rng.normal();
    const double mass = 32.0 + 7.0 * rng.normal();
    const double pedigree = 0.4 + 0.3 * rng.uniform();
    const double age = 30.0 + std::floor(15.0 * rng.uniform());
    const double eta = -5.0 + 0.03 * glucose + 0.05 * mass + 0.02 * age;
    const int y = rng.uniform() < psun::logistic_cdf(eta) ? 1 : 0;

    const bool na_triceps = rng.uniform() < 0.30;
    const bool na_insulin = rng.uniform() < 0.48;
    const bool na_kept = i < incomplete_rows;  // NA in a retained column

    out << pregnant << ',';
    if (na_kept && i % 2 == 0) {
      out << "NA,";
    } else {
      out << glucose << ',';
    }
    if (na_kept && i % 2 == 1) {
      out << "NA,";
    } else {
      out << pressure << ',';
    }
    if (na_triceps) {
      out << "NA,";
    } else {
      out << triceps << ',';
    }
    if (na_insulin) {
      out << "NA,";
    } else {
      out << insulin << ',';
    }
    out << mass << ',' << pedigree << ',' << age << ',' << y << '\n';
  }
}

inline void write_expression_like_csv(const std::string& path, int n = 74, int tags = 516) {
  psun::RngStream rng(515151);
  std::ofstream out(path);
  for (int j = 0; j < tags; ++j) out << "tag" << (j + 1) << ',';
  out << "y\n";
  for (int i = 0; i < n; ++i) {
    double signal = 0.0;
    for (int j = 0; j < tags; ++j) {
      const double v = rng.normal();
      if (j < 5) signal += v;
      out << v << ',';
    }
    out << (rng.uniform() < psun::logistic_cdf(signal) ? 1 : 0) << '\n';
  }
}

inline void write_small_na_csv(const std::string& path) {
  std::ofstream out(path);
  out << "x1,x2,y\n";
  for (int i = 0; i < 9; ++i)
    out << 0.1 * i << ',' << (i % 2 == 0 ? -1.0 : 2.0) + 0.01 * i << ',' << i % 2 << '\n';
  out << "0.99,NA,1\n";
}

}  // namespace fixtures
