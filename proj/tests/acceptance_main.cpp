// Acceptance suite: runs every reproduction criterion at its pinned tolerance
// and prints one pass/fail line per criterion. Exit code 0 iff nothing failed.

#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

#include "qmis/qmis.hpp"

int main(int argc, char** argv) {
  qmis::ReproduceOptions opts;
  opts.out_dir = "acceptance-runs";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      opts.master_seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      opts.out_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--qmax") == 0 && i + 1 < argc) {
      opts.limits.max_qubits = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--no-determinism") == 0) {
      opts.determinism_check = false;
    } else {
      std::cerr << "usage: acceptance [--seed S] [--out DIR] [--qmax Q] [--no-determinism]\n";
      return 2;
    }
  }

  std::vector<qmis::CriterionResult> rows = qmis::reproduce_paper(opts);
  int failures = 0;
  for (const qmis::CriterionResult& row : rows) {
    if (row.status == "FAIL") ++failures;
    std::printf("[%2d/%2zu] %-4s %-32s %6.1fs  %s (expected: %s)\n", row.id, rows.size(),
                row.status.c_str(), row.name.c_str(), row.seconds, row.measured.c_str(),
                row.expected.c_str());
  }
  std::printf("%s: %d of %zu criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures,
              rows.size());
  return failures == 0 ? 0 : 1;
}
