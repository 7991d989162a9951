#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "chatlens/corpus.hpp"

namespace chatlens::membership {

struct CountryDistribution {
  std::map<CountryCode, double> proportions;
  std::size_t member_count = 0;

  double share(const CountryCode& c) const;
  double share(Country tag) const;  // only meaningful for tracked tags
  /// 1 - p(CO) - p(VE).
  double third_country_share() const;
};

/// Distinct senders of a group's messages. Throws DataError for unknown groups.
std::set<PhoneNumber> members(const Corpus& corpus, std::string_view group_uid);

CountryDistribution country_distribution(const Corpus& corpus, std::string_view group_uid);
CountryDistribution distribution_from_members(const std::set<PhoneNumber>& members);

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const CountryDistribution& d);
/// Sum of squared proportions.
double simpson(const CountryDistribution& d);

struct CoMembershipDegree {
  std::size_t total = 0;
  std::size_t to_co = 0;
  std::size_t to_ve = 0;
};

/// Distinct co-members per user across all shared groups, self excluded.
std::map<std::string, CoMembershipDegree> co_membership_degrees(const Corpus& corpus);

struct GroupMembershipRow {
  std::string group_uid;
  std::size_t size = 0;
  double p_co = 0, p_ve = 0, p_other = 0;
  double entropy = 0, simpson = 0;
};

std::vector<GroupMembershipRow> membership_table(const Corpus& corpus);
void write_membership_csv(std::ostream& out, const std::vector<GroupMembershipRow>& rows);

}  // namespace chatlens::membership
