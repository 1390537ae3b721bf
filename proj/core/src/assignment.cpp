#include "mca/assignment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mca/types.hpp"

namespace mca {

std::vector<std::pair<std::size_t, std::size_t>> hungarian(const Eigen::MatrixXd& cost) {
  const auto m = static_cast<std::size_t>(cost.rows());
  const auto n = static_cast<std::size_t>(cost.cols());
  if (m == 0 || n == 0) {
    return {};
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("cost matrix has a non-finite entry");
  }

  const std::size_t N = std::max(m, n);
  const double pad = 1.0 + cost.maxCoeff();
  auto c = [&](std::size_t i, std::size_t j) {
    return (i < m && j < n) ? cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                            : pad;
  };

  // 1-based arrays; index 0 is the virtual source column.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(N + 1, 0.0);
  std::vector<double> v(N + 1, 0.0);
  std::vector<std::size_t> p(N + 1, 0);  // p[j]: row assigned to column j
  std::vector<std::size_t> way(N + 1, 0);

  for (std::size_t i = 1; i <= N; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(N + 1, kInf);
    std::vector<char> used(N + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= N; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= N; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(std::min(m, n));
  for (std::size_t j = 1; j <= N; ++j) {
    const std::size_t i = p[j] - 1;
    if (i < m && j - 1 < n) {
      out.emplace_back(i, j - 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double assignment_cost(const Eigen::MatrixXd& cost,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double total = 0.0;
  for (const auto& [i, j] : pairs) {
    total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return total;
}

Association associate(const AffinityMatrix& A, double accept_threshold) {
  Association out;
  out.frame_id = A.frame_id;
  const auto rows = static_cast<std::size_t>(A.values.rows());
  const auto cols = static_cast<std::size_t>(A.values.cols());
  std::vector<char> used_a(rows, 0);
  std::vector<char> used_b(cols, 0);

  const Eigen::MatrixXd cost = (1.0 - A.values.array()).matrix();
  for (const auto& [i, j] : hungarian(cost)) {
    const double a = A.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (a > accept_threshold) {
      out.pairs.push_back({i, j, a});
      used_a[i] = 1;
      used_b[j] = 1;
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (!used_a[i]) {
      out.unmatched_a.push_back(i);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (!used_b[j]) {
      out.unmatched_b.push_back(j);
    }
  }
  return out;
}

void write_associations(std::ostream& out, const Association& assoc, const AffinityMatrix& A,
                        bool header) {
  if (header) {
    out << "frame_id,det_a,det_b,person_a,person_b,affinity\n";
  }
  const auto precision = out.precision(17);
  for (const auto& p : assoc.pairs) {
    out << assoc.frame_id << ',' << p.index_a << ',' << p.index_b << ','
        << A.row_person_ids.at(p.index_a) << ',' << A.col_person_ids.at(p.index_b) << ','
        << p.affinity << '\n';
  }
  out.precision(precision);
}

namespace {

template <typename T>
bool parse_field(std::string_view f, T& out) {
  const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
  return ec == std::errc() && end == f.data() + f.size();
}

}  // namespace

std::map<int, Association> parse_associations(std::string_view text) {
  std::map<int, Association> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty() || line.starts_with("frame_id")) {
      continue;
    }
    std::vector<std::string_view> f;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    if (f.size() != 6) {
      throw ValidationError("association row needs 6 fields", line_no);
    }
    int frame = 0;
    int person_a = 0;
    int person_b = 0;
    AssociatedPair p;
    if (!parse_field(f[0], frame) || !parse_field(f[1], p.index_a) ||
        !parse_field(f[2], p.index_b) || !parse_field(f[3], person_a) ||
        !parse_field(f[4], person_b) || !parse_field(f[5], p.affinity)) {
      throw ValidationError("malformed association row", line_no);
    }
    auto& a = out[frame];
    a.frame_id = frame;
    a.pairs.push_back(p);
  }
  return out;
}

}  // namespace mca
