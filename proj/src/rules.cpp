#include "riskminer/rules.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>

#include "riskminer/errors.hpp"

namespace riskminer {

FactorMap::FactorMap(std::vector<Factor> entries, int victim_item)
    : entries_(std::move(entries)), victim_item_(victim_item) {
    std::sort(entries_.begin(), entries_.end(), [](const Factor& a, const Factor& b) { return a.id < b.id; });
    std::map<std::string, std::set<int>> values;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& f = entries_[k];
        if (f.id != static_cast<int>(k) + 1) throw ConfigError("factor map: ids must be dense from 1");
        if (f.value != 0 && f.value != 1) throw ConfigError("factor map: feature '" + f.feature + "' is not binary");
        if (!values[f.feature].insert(f.value).second)
            throw ConfigError("factor map: duplicate value for feature '" + f.feature + "'");
    }
    for (const auto& [feature, vals] : values)
        if (vals.size() != 2) throw ConfigError("factor map: feature '" + feature + "' needs one factor per value");
    if (victim_item_ <= static_cast<int>(entries_.size()))
        throw ConfigError("factor map: victim item collides with a factor id");
}

const FactorMap& FactorMap::standard() {
    static const FactorMap map([] {
        struct Row {
            const char* feature;
            int first_value;
            const char* first;
            const char* second;
        };
        // Factor 2k-1 describes first_value, 2k the other value.
        const Row rows[] = {
            {"weak-password", 1, "utilized weak passwords such as 1,2,3,4,5,6.. on local machines or internet accounts.",
             "never used passwords such as 1,2,3,4,5,6 on local machines or internet accounts."},
            {"victimized-by-blackmailing", 1, "poorly influenced by blackmailing", "never victimized by blackmailing."},
            {"lost-money-by-purchasing-online-commodities", 1, "misplaced money by purchasing online commodities",
             "never misplaced money by purchasing online commodities"},
            {"compulsive-buyer", 0, "have sufficient control over online product purchases.",
             "compulsively purchase the online product."},
            {"disclose-sentiment-on-social-media", 1, "Always disclose sentiments in public places like social media.",
             "never shared sentiments on social media."},
            {"download-unauthorized-software", 1, "Always download software from third-party sources.",
             "never downloaded software from third-party sources."},
            {"shared-email-access", 1, "shared personal information like email ID access with others.",
             "never shared email ID access with others."},
            {"permitted-ingress-in-email", 1, "permitted another user access to the email account.",
             "never permitted another user access to the email account."},
            {"social-media-user", 1, "uses social media like Facebook, Twitter, etc.", "have no social media account."},
            {"clicked-on-spam-email-links", 1, "clicked on spam or fraudulent links in emails.",
             "never clicked on spam or fraudulent links in emails."},
            {"shared-private-devices", 1, "Shared private devices with anyone else.",
             "never Shared private devices with anyone else."},
            {"accessed-VPN", 1, "accessed VPN persistently", "does not access VPN persistently."},
            {"sharing-private-information-on-the-internet", 1,
             "share confidential information on social media, like images or bank account numbers.",
             "never shared confidential information on social media."},
            {"installed-malicious-software", 1, "installed malicious software on the devices.",
             "never installed malicious software on the devices."},
            {"shared-internet-account-access", 1, "shared internet account access with others.",
             "never shared internet account access with others."},
            {"used-virus-infected-pen-drive", 1, "used malware-infected flash drives in personal devices.",
             "never use malware-infected flash drives on personal devices."},
            {"receive-phishing-email", 1, "received always phishing emails", "never received any phishing emails"},
            {"online-products-purchaser", 1, "online products purchaser", "not an online products purchaser."},
            {"aware-about-cybercrime", 1, "aware of cybercrime.", "not aware of cybercrime."},
        };
        std::vector<Factor> out;
        int id = 1;
        for (const auto& r : rows) {
            out.push_back({id++, r.feature, r.first_value, r.first});
            out.push_back({id++, r.feature, 1 - r.first_value, r.second});
        }
        return out;
    }());
    return map;
}

const Factor& FactorMap::factor(int id) const {
    if (id < 1 || id > static_cast<int>(entries_.size())) throw ConfigError("unknown factor id " + std::to_string(id));
    return entries_[static_cast<std::size_t>(id - 1)];
}

std::string FactorMap::describe(int item) const { return item == victim_item_ ? "victim" : factor(item).description; }

std::vector<std::string> FactorMap::features() const {
    std::vector<std::string> out;
    for (const auto& f : entries_)
        if (std::find(out.begin(), out.end(), f.feature) == out.end()) out.push_back(f.feature);
    return out;
}

namespace {

struct Resolved {
    std::size_t column;
    int value;
    int id;
};

std::vector<Resolved> resolve(const Schema& schema, const FactorMap& fm) {
    std::vector<Resolved> out;
    for (const auto& f : fm.entries()) {
        const auto column = schema.find(f.feature);
        if (!column) throw UnmappedFeature(f.feature);
        out.push_back({*column, f.value, f.id});
    }
    return out;
}

Transaction dissolve_resolved(std::span<const int> record, int label, const std::vector<Resolved>& map, int victim) {
    Transaction t;
    for (const auto& r : map)
        if ((record[r.column] == 1) == (r.value == 1)) t.push_back(r.id);
    if (label == 1) t.push_back(victim);
    std::sort(t.begin(), t.end());
    return t;
}

} // namespace

Transaction dissolve(std::span<const int> record, int label, const Schema& schema, const FactorMap& fm) {
    if (record.size() != schema.size()) throw FeatureMismatch("dissolve: record width differs from the schema");
    return dissolve_resolved(record, label, resolve(schema, fm), fm.victim_item());
}

std::vector<Transaction> dissolve_dataset(const Dataset& ds, const FactorMap& fm) {
    const auto map = resolve(ds.schema(), fm);
    std::vector<Transaction> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        out.push_back(dissolve_resolved(ds.row(i), ds.label(i), map, fm.victim_item()));
    return out;
}

const FrequentItemset* AprioriResult::find(std::span<const int> items) const {
    auto it = std::lower_bound(itemsets.begin(), itemsets.end(), items, [](const FrequentItemset& a, std::span<const int> b) {
        if (a.items.size() != b.size()) return a.items.size() < b.size();
        return std::lexicographical_compare(a.items.begin(), a.items.end(), b.begin(), b.end());
    });
    if (it == itemsets.end() || !std::equal(it->items.begin(), it->items.end(), items.begin(), items.end()))
        return nullptr;
    return &*it;
}

namespace {

// Transaction-id bitset per itemset; counting a candidate is one AND + popcount.
using Bits = std::vector<std::uint64_t>;

std::size_t and_count(const Bits& a, const Bits& b, Bits& out) {
    std::size_t n = 0;
    out.resize(a.size());
    for (std::size_t w = 0; w < a.size(); ++w) {
        out[w] = a[w] & b[w];
        n += static_cast<std::size_t>(std::popcount(out[w]));
    }
    return n;
}

} // namespace

AprioriResult apriori(const std::vector<Transaction>& transactions, double min_support) {
    if (transactions.empty()) throw EmptyInput("apriori: no transactions");
    if (!(min_support > 0.0 && min_support <= 1.0)) throw ConfigError("apriori: min_support must lie in (0, 1]");
    const std::size_t n = transactions.size();
    const auto frequent = [&](std::size_t count) {
        return static_cast<double>(count) / static_cast<double>(n) >= min_support - 1e-12;
    };
    const std::size_t words = (n + 63) / 64;

    std::map<int, Bits> item_bits;
    for (std::size_t t = 0; t < n; ++t)
        for (int item : transactions[t]) {
            auto& bits = item_bits[item];
            if (bits.empty()) bits.assign(words, 0);
            bits[t / 64] |= std::uint64_t{1} << (t % 64);
        }

    AprioriResult result;
    result.transactions = n;
    struct Level {
        std::vector<int> items;
        std::size_t count;
        Bits bits;
    };
    std::vector<Level> level;
    for (const auto& [item, bits] : item_bits) {
        std::size_t count = 0;
        for (auto w : bits) count += static_cast<std::size_t>(std::popcount(w));
        if (frequent(count)) level.push_back({{item}, count, bits});
    }

    while (!level.empty()) {
        for (const auto& l : level)
            result.itemsets.push_back({l.items, l.count, static_cast<double>(l.count) / static_cast<double>(n)});
        std::set<std::vector<int>> known;
        for (const auto& l : level) known.insert(l.items);

        std::vector<Level> next;
        Bits scratch;
        for (std::size_t a = 0; a < level.size(); ++a) {
            const auto& x = level[a].items;
            for (std::size_t b = a + 1; b < level.size(); ++b) {
                const auto& y = level[b].items;
                // Sorted level: members sharing x's prefix are contiguous.
                if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
                std::vector<int> candidate = x;
                candidate.push_back(y.back());
                bool closed = true;
                for (std::size_t drop = 0; drop + 2 < candidate.size() && closed; ++drop) {
                    std::vector<int> subset;
                    for (std::size_t k = 0; k < candidate.size(); ++k)
                        if (k != drop) subset.push_back(candidate[k]);
                    closed = known.count(subset) > 0;
                }
                if (!closed) continue;
                const std::size_t count = and_count(level[a].bits, item_bits.at(y.back()), scratch);
                if (frequent(count)) next.push_back({std::move(candidate), count, scratch});
            }
        }
        level = std::move(next);
    }
    return result;
}

std::vector<Rule> derive_rules(const AprioriResult& frequent, double min_confidence, std::vector<int> consequent,
                               std::size_t cap) {
    std::sort(consequent.begin(), consequent.end());
    consequent.erase(std::unique(consequent.begin(), consequent.end()), consequent.end());
    std::vector<Rule> rules;
    const auto* c = frequent.find(consequent);
    if (consequent.empty() || c == nullptr) return rules;

    for (const auto& s : frequent.itemsets) {
        if (s.items.size() <= consequent.size()) continue;
        if (!std::includes(s.items.begin(), s.items.end(), consequent.begin(), consequent.end())) continue;
        Rule r;
        std::set_difference(s.items.begin(), s.items.end(), consequent.begin(), consequent.end(),
                            std::back_inserter(r.antecedent));
        const auto* a = frequent.find(r.antecedent);
        if (a == nullptr) throw StageError("apriori result is not downward closed");
        r.consequent = consequent;
        r.support = s.support;
        r.confidence = static_cast<double>(s.count) / static_cast<double>(a->count);
        r.lift = r.confidence / c->support;
        if (r.confidence >= min_confidence - 1e-12) rules.push_back(std::move(r));
    }
    std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.support != b.support) return a.support > b.support;
        return a.antecedent < b.antecedent;
    });
    if (rules.size() > cap) rules.resize(cap);
    return rules;
}

RuleMetrics rule_metrics(const Rule& rule, const std::vector<Transaction>& transactions) {
    std::size_t both = 0;
    std::size_t ante = 0;
    std::size_t cons = 0;
    for (const auto& t : transactions) {
        const bool a = std::includes(t.begin(), t.end(), rule.antecedent.begin(), rule.antecedent.end());
        const bool b = std::includes(t.begin(), t.end(), rule.consequent.begin(), rule.consequent.end());
        ante += a ? 1 : 0;
        cons += b ? 1 : 0;
        both += a && b ? 1 : 0;
    }
    if (ante == 0) throw ZeroAntecedentSupport("rule antecedent never occurs");
    const double n = static_cast<double>(transactions.size());
    RuleMetrics m;
    m.support = static_cast<double>(both) / n;
    m.confidence = static_cast<double>(both) / static_cast<double>(ante);
    m.lift = cons == 0 ? 0.0 : m.confidence / (static_cast<double>(cons) / n);
    return m;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::string join(const std::vector<int>& items, const FactorMap& fm, bool describe) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (k) out += describe ? " AND " : ";";
        out += describe ? fm.describe(items[k]) : std::to_string(items[k]);
    }
    return out;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::string format_rules_csv(const std::vector<Rule>& rules, const FactorMap& fm) {
    std::string out = "rank,antecedent_ids,antecedent,consequent_ids,consequent,support,confidence,lift\n";
    for (std::size_t k = 0; k < rules.size(); ++k) {
        const auto& r = rules[k];
        out += std::to_string(k + 1) + ',' + join(r.antecedent, fm, false) + ',' +
               csv_quote(join(r.antecedent, fm, true)) + ',' + join(r.consequent, fm, false) + ',' +
               csv_quote(join(r.consequent, fm, true)) + ',' + fixed6(r.support) + ',' + fixed6(r.confidence) + ',' +
               fixed6(r.lift) + '\n';
    }
    return out;
}

} // namespace riskminer
