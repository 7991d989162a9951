#include "chatlens/membership.hpp"

#include <cmath>
#include <ostream>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"

namespace chatlens::membership {

double CountryDistribution::share(const CountryCode& c) const {
  auto it = proportions.find(c);
  return it == proportions.end() ? 0.0 : it->second;
}

double CountryDistribution::share(Country tag) const { return share(CountryCode{tag, {}}); }

double CountryDistribution::third_country_share() const {
  return 1.0 - share(Country::CO) - share(Country::VE);
}

std::set<PhoneNumber> members(const Corpus& corpus, std::string_view group_uid) {
  std::set<PhoneNumber> out;
  for (const auto& e164 : corpus.group_members(group_uid)) out.insert(corpus.users().at(e164));
  return out;
}

CountryDistribution distribution_from_members(const std::set<PhoneNumber>& ms) {
  CountryDistribution d;
  d.member_count = ms.size();
  if (ms.empty()) return d;
  std::map<CountryCode, std::size_t> counts;
  for (const auto& p : ms) ++counts[p.country];
  for (const auto& [code, n] : counts) {
    d.proportions[code] = static_cast<double>(n) / static_cast<double>(ms.size());
  }
  return d;
}

CountryDistribution country_distribution(const Corpus& corpus, std::string_view group_uid) {
  return distribution_from_members(members(corpus, group_uid));
}

double entropy(const CountryDistribution& d) {
  double h = 0;
  for (const auto& [code, p] : d.proportions) {
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

double simpson(const CountryDistribution& d) {
  double s = 0;
  for (const auto& [code, p] : d.proportions) s += p * p;
  return s;
}

std::map<std::string, CoMembershipDegree> co_membership_degrees(const Corpus& corpus) {
  std::map<std::string, std::set<std::string>> neighbours;
  for (const auto& [uid, g] : corpus.groups()) {
    const auto& ms = corpus.group_members(uid);
    for (const auto& u : ms) {
      auto& n = neighbours[u];
      for (const auto& v : ms) {
        if (v != u) n.insert(v);
      }
    }
  }
  std::map<std::string, CoMembershipDegree> out;
  for (const auto& [user, ns] : neighbours) {
    CoMembershipDegree d;
    d.total = ns.size();
    for (const auto& v : ns) {
      Country c = corpus.users().at(v).country.tag;
      if (c == Country::CO) ++d.to_co;
      if (c == Country::VE) ++d.to_ve;
    }
    out[user] = d;
  }
  return out;
}

std::vector<GroupMembershipRow> membership_table(const Corpus& corpus) {
  std::vector<GroupMembershipRow> rows;
  for (const auto& [uid, g] : corpus.groups()) {
    auto d = country_distribution(corpus, uid);
    GroupMembershipRow r;
    r.group_uid = uid;
    r.size = d.member_count;
    r.p_co = d.share(Country::CO);
    r.p_ve = d.share(Country::VE);
    r.p_other = d.third_country_share();
    r.entropy = entropy(d);
    r.simpson = simpson(d);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_membership_csv(std::ostream& out, const std::vector<GroupMembershipRow>& rows) {
  csv::Writer w(out);
  w.header({"group_uid", "size", "p_CO", "p_VE", "p_other", "entropy", "simpson"});
  for (const auto& r : rows) {
    w << r.group_uid << r.size << r.p_co << r.p_ve << r.p_other << r.entropy << r.simpson;
    w.end_row();
  }
}

}  // namespace chatlens::membership
