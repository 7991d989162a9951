#include <iostream>
#include <map>
#include <memory>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/stats.hpp"
#include "common.hpp"

namespace chatlens::cli {

namespace {

struct StatsFlags {
  std::string formula;
  std::string column;
  std::string by;
  std::string a, b;
  std::string x, y;
};

struct LoadedTable {
  std::string path;
  csv::Table table;

  std::vector<double> numbers(const std::string& name) const {
    try {
      return table.numeric_column(name);
    } catch (const DataError& e) {
      throw DataError(path + ": " + e.what());
    }
  }

  // Values of `column` split by the levels of `by`, levels in first-seen order.
  std::vector<std::pair<std::string, std::vector<double>>> grouped(const std::string& column,
                                                                   const std::string& by) const {
    const auto values = numbers(column);
    std::size_t by_col = 0;
    try {
      by_col = table.column(by);
    } catch (const DataError& e) {
      throw DataError(path + ": " + e.what());
    }
    std::vector<std::pair<std::string, std::vector<double>>> out;
    std::map<std::string, std::size_t> slot;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string level = by_col < table.rows[r].size() ? table.rows[r][by_col] : std::string{};
      auto [it, fresh] = slot.emplace(level, out.size());
      if (fresh) out.push_back({level, {}});
      out[it->second].second.push_back(values[r]);
    }
    return out;
  }
};

LoadedTable load_table(Context& ctx) {
  const std::string path = ctx.single_input("CSV file");
  try {
    return {path, csv::read_file(path)};
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Writes to <out>/<name> when --out is given, otherwise to stdout.
template <typename Fn>
void emit(Context& ctx, const std::string& name, Fn&& write) {
  if (ctx.opts.out.empty()) {
    write(std::cout);
  } else {
    auto out = ctx.open_output(name);
    write(out);
  }
}

void run_ols(Context& ctx, const StatsFlags& f) {
  if (f.formula.empty()) throw ArgumentError("--formula is required");
  const auto formula = stats::parse_formula(f.formula);
  const auto t = load_table(ctx);
  std::vector<stats::Regressor> columns;
  for (const auto& name : formula.regressors) columns.push_back({name, t.numbers(name)});
  const auto y = t.numbers(formula.response);
  const auto fit = stats::ols(columns, y, formula.intercept);
  emit(ctx, "ols.csv", [&](std::ostream& out) { stats::write_ols_csv(out, fit); });
}

void run_ttest(Context& ctx, const StatsFlags& f) {
  const bool paired_columns = !f.a.empty() || !f.b.empty();
  if (paired_columns && (f.a.empty() || f.b.empty())) throw ArgumentError("--a and --b go together");
  if (!paired_columns && (f.column.empty() || f.by.empty())) throw ArgumentError("give --a/--b or --column/--by");
  const auto t = load_table(ctx);
  std::vector<double> a, b;
  if (paired_columns) {
    a = t.numbers(f.a);
    b = t.numbers(f.b);
  } else {
    auto groups = t.grouped(f.column, f.by);
    if (groups.size() != 2) {
      throw DataError(t.path + ": column '" + f.by + "' has " + std::to_string(groups.size()) +
                      " levels; a t-test needs exactly two");
    }
    a = std::move(groups[0].second);
    b = std::move(groups[1].second);
  }
  const auto r = stats::welch_t(a, b);
  emit(ctx, "ttest.csv", [&](std::ostream& out) {
    csv::Writer w(out);
    w.header({"n_a", "n_b", "mean_a", "mean_b", "t", "dof", "p"});
    w << a.size() << b.size() << r.mean_a << r.mean_b << r.t << r.dof << r.p;
    w.end_row();
  });
}

void run_anova(Context& ctx, const StatsFlags& f) {
  if (f.column.empty() || f.by.empty()) throw ArgumentError("--column and --by are required");
  const auto t = load_table(ctx);
  std::vector<std::vector<double>> groups;
  for (auto& [level, values] : t.grouped(f.column, f.by)) groups.push_back(std::move(values));
  const auto r = stats::anova_oneway(groups);
  emit(ctx, "anova.csv", [&](std::ostream& out) {
    csv::Writer w(out);
    w.header({"groups", "f", "dof1", "dof2", "p"});
    w << groups.size() << r.f << r.dof1 << r.dof2 << r.p;
    w.end_row();
  });
}

void run_pearson(Context& ctx, const StatsFlags& f) {
  if (f.x.empty() || f.y.empty()) throw ArgumentError("--x and --y are required");
  const auto t = load_table(ctx);
  const auto r = stats::pearson(t.numbers(f.x), t.numbers(f.y));
  emit(ctx, "pearson.csv", [&](std::ostream& out) {
    csv::Writer w(out);
    w.header({"n", "r", "p"});
    w << r.n << r.r << r.p;
    w.end_row();
  });
}

}  // namespace

void register_misc(CLI::App& app, Context& ctx, Action& action) {
  auto* st = app.add_subcommand("stats", "Ad-hoc tests over a CSV file");
  st->require_subcommand(1);
  auto f = std::make_shared<StatsFlags>();

  auto* ols = st->add_subcommand("ols", "Least squares from a formula such as 'y ~ x1 + x2'");
  ols->add_option("--formula", f->formula)->required();
  ols->callback([&ctx, &action, f] { action = [&ctx, f] { run_ols(ctx, *f); }; });

  auto* tt = st->add_subcommand("ttest", "Welch t-test of two columns or two levels");
  tt->add_option("--a", f->a, "First sample column");
  tt->add_option("--b", f->b, "Second sample column");
  tt->add_option("--column", f->column, "Value column");
  tt->add_option("--by", f->by, "Grouping column with two levels");
  tt->callback([&ctx, &action, f] { action = [&ctx, f] { run_ttest(ctx, *f); }; });

  auto* an = st->add_subcommand("anova", "One-way ANOVA of a column by a grouping column");
  an->add_option("--column", f->column)->required();
  an->add_option("--by", f->by)->required();
  an->callback([&ctx, &action, f] { action = [&ctx, f] { run_anova(ctx, *f); }; });

  auto* pe = st->add_subcommand("pearson", "Pearson correlation of two columns");
  pe->add_option("--x", f->x)->required();
  pe->add_option("--y", f->y)->required();
  pe->callback([&ctx, &action, f] { action = [&ctx, f] { run_pearson(ctx, *f); }; });
}

}  // namespace chatlens::cli
