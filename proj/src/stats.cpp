// SPDX-License-Identifier: Apache-2.0
//! \file stats.cpp
#include "pbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace pbm
{
//---------------------------------------------------------------------------//
EmpiricalCdf::EmpiricalCdf(std::vector<double> values)
    : sorted_(std::move(values))
{
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const
{
    if (sorted_.empty())
    {
        return 0;
    }
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin())
           / static_cast<double>(sorted_.size());
}

//---------------------------------------------------------------------------//
double ks_statistic(EmpiricalCdf const& sample,
                    std::function<double(double)> const& cdf)
{
    auto const values = sample.sorted();
    double const n = static_cast<double>(values.size());
    double worst = 0;
    std::size_t i = 0;
    while (i < values.size())
    {
        // Group ties so the empirical jump is taken as a whole
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] == values[i])
        {
            ++j;
        }
        double const f = cdf(values[i]);
        double const below = static_cast<double>(i) / n;
        double const above = static_cast<double>(j + 1) / n;
        worst = std::max({worst, std::fabs(above - f), std::fabs(f - below)});
        i = j + 1;
    }
    return worst;
}

double ks_two_sample(EmpiricalCdf const& a, EmpiricalCdf const& b)
{
    auto const x = a.sorted();
    auto const y = b.sorted();
    if (x.empty() || y.empty())
    {
        throw std::invalid_argument("ks_two_sample: empty sample");
    }
    double const n = static_cast<double>(x.size());
    double const m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double worst = 0;
    while (i < x.size() && j < y.size())
    {
        double const v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v)
        {
            ++i;
        }
        while (j < y.size() && y[j] == v)
        {
            ++j;
        }
        worst = std::max(worst,
                         std::fabs(static_cast<double>(i) / n
                                   - static_cast<double>(j) / m));
    }
    return worst;
}

double ks_critical_one_sample(std::size_t n, double coefficient)
{
    return coefficient / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double coefficient)
{
    double const dn = static_cast<double>(n);
    double const dm = static_cast<double>(m);
    return coefficient * std::sqrt((dn + dm) / (dn * dm));
}

//---------------------------------------------------------------------------//
namespace
{
class Fenwick
{
  public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i)
    {
        for (++i; i < tree_.size(); i += i & (~i + 1))
        {
            ++tree_[i];
        }
    }
    //! Number of inserted indices < end
    std::size_t prefix(std::size_t end) const
    {
        std::size_t sum = 0;
        for (std::size_t i = end; i > 0; i -= i & (~i + 1))
        {
            sum += tree_[i];
        }
        return sum;
    }

  private:
    std::vector<std::size_t> tree_;
};

// Lower-left counts #{s : s.x <= q.x, s.y <= q.y} for each query
std::vector<std::size_t> lower_left_counts(std::span<Pair const> sample,
                                           std::span<Pair const> queries,
                                           std::vector<double> const& ys)
{
    std::vector<std::size_t> sample_order(sample.size());
    std::vector<std::size_t> query_order(queries.size());
    for (std::size_t i = 0; i < sample_order.size(); ++i)
    {
        sample_order[i] = i;
    }
    for (std::size_t i = 0; i < query_order.size(); ++i)
    {
        query_order[i] = i;
    }
    std::sort(sample_order.begin(), sample_order.end(),
              [&](std::size_t l, std::size_t r) { return sample[l].first < sample[r].first; });
    std::sort(query_order.begin(), query_order.end(),
              [&](std::size_t l, std::size_t r) { return queries[l].first < queries[r].first; });

    auto rank_of = [&ys](double v) {
        return static_cast<std::size_t>(
            std::lower_bound(ys.begin(), ys.end(), v) - ys.begin());
    };
    auto count_upto = [&ys](double v) {
        return static_cast<std::size_t>(
            std::upper_bound(ys.begin(), ys.end(), v) - ys.begin());
    };

    Fenwick tree(ys.size());
    std::vector<std::size_t> out(queries.size());
    std::size_t next = 0;
    for (std::size_t qi : query_order)
    {
        Pair const& q = queries[qi];
        while (next < sample_order.size()
               && sample[sample_order[next]].first <= q.first)
        {
            tree.add(rank_of(sample[sample_order[next]].second));
            ++next;
        }
        out[qi] = tree.prefix(count_upto(q.second));
    }
    return out;
}

std::vector<double> sorted_coordinate(std::span<Pair const> s, bool first)
{
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        out[i] = first ? s[i].first : s[i].second;
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

//---------------------------------------------------------------------------//
double ks2d_two_sample(std::span<Pair const> a, std::span<Pair const> b)
{
    if (a.empty() || b.empty())
    {
        throw std::invalid_argument("ks2d_two_sample: empty sample");
    }
    std::vector<Pair> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());

    std::vector<double> ys = sorted_coordinate(pooled, false);
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    auto ll_a = lower_left_counts(a, pooled, ys);
    auto ll_b = lower_left_counts(b, pooled, ys);
    auto ax = sorted_coordinate(a, true);
    auto ay = sorted_coordinate(a, false);
    auto bx = sorted_coordinate(b, true);
    auto by = sorted_coordinate(b, false);
    auto upto = [](std::vector<double> const& v, double x) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
    };

    double const na = static_cast<double>(a.size());
    double const nb = static_cast<double>(b.size());
    double worst = 0;
    for (std::size_t i = 0; i < pooled.size(); ++i)
    {
        auto [u, v] = pooled[i];
        double const lla = static_cast<double>(ll_a[i]);
        double const llb = static_cast<double>(ll_b[i]);
        double const xa = upto(ax, u), ya = upto(ay, v);
        double const xb = upto(bx, u), yb = upto(by, v);
        double const quads_a[4] = {lla, ya - lla, xa - lla, na - xa - ya + lla};
        double const quads_b[4] = {llb, yb - llb, xb - llb, nb - xb - yb + llb};
        for (int q = 0; q < 4; ++q)
        {
            worst = std::max(worst, std::fabs(quads_a[q] / na - quads_b[q] / nb));
        }
    }
    return worst;
}

//---------------------------------------------------------------------------//
double chi_square_uniform(std::span<std::size_t const> counts)
{
    double total = 0;
    for (auto c : counts)
    {
        total += static_cast<double>(c);
    }
    double const expected = total / static_cast<double>(counts.size());
    double stat = 0;
    for (auto c : counts)
    {
        double const diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

double chi_square_quantile(double probability, std::size_t dof)
{
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::quantile(dist, probability);
}

//---------------------------------------------------------------------------//
}  // namespace pbm
