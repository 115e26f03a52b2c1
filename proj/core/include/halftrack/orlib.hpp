#pragma once

#include <istream>
#include <string>

#include "halftrack/types.hpp"

namespace halftrack {

// Token ordering of an OR-Library indtrack-style price file. The archive
// readme is the only authority on the true ordering, so the parser takes
// it as an explicit parameter instead of guessing.
enum class OrlibLayout {
  period_index_first,  // per period: index, stock_1 .. stock_N
  period_index_last,   // per period: stock_1 .. stock_N, index
  series_index_first,  // full index series, then each stock series
  series_index_last,   // each stock series, then the full index series
};

OrlibLayout parse_layout(const std::string& name);
std::string layout_name(OrlibLayout layout);

// Weekly price levels for one index and its N constituents.
struct PricePanel {
  Vector index_prices;          // length T_p
  Matrix stock_prices;          // T_p x N, column i = stock i
  std::string source_name;

  Index n_stocks() const { return stock_prices.cols(); }
  Index n_periods() const { return stock_prices.rows(); }
};

// Simple returns built from a PricePanel, with a chronological
// train/test split (train block = first train_rows rows).
struct ReturnsData {
  Matrix stock_returns;   // T x N
  Vector index_returns;   // length T
  Index train_rows = 0;
  Index test_rows = 0;

  Index n_periods() const { return stock_returns.rows(); }
  Index n_stocks() const { return stock_returns.cols(); }

  auto train_matrix() const { return stock_returns.topRows(train_rows); }
  auto train_index() const { return index_returns.head(train_rows); }
  auto test_matrix() const { return stock_returns.bottomRows(test_rows); }
  auto test_index() const { return index_returns.tail(test_rows); }
};

// Parses a whitespace-separated stream: two positive integers N and T_p,
// then exactly (N+1)*T_p price tokens arranged per `layout`.
// Throws TokenCountMismatch, MalformedNumber, NonPositivePrice.
PricePanel parse_orlib(std::istream& in, OrlibLayout layout,
                       const std::string& source_name = "");
PricePanel parse_orlib_file(const std::string& path, OrlibLayout layout);

// r_it = (P_{i,t+1} - P_it) / P_it, one row per return period.
// Result is unsplit: train_rows = T, test_rows = 0.
ReturnsData to_returns(const PricePanel& panel);

// Marks the chronologically first `train_count` rows as the training
// block. Requires 1 <= train_count <= T-1.
ReturnsData split(const ReturnsData& data, Index train_count);

// Default split at floor(T/2).
ReturnsData split_half(const ReturnsData& data);

}  // namespace halftrack
