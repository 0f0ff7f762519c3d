#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prmrl/common.hpp"

namespace prmrl {

// A label is a subset of the machine's atomic propositions, packed as a
// bitmask over the ordered proposition set.
using Label = std::uint32_t;

constexpr std::size_t kMaxPropositions = 20;

class PropositionSet {
public:
    PropositionSet() = default;

    explicit PropositionSet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
        if (symbols_.size() > kMaxPropositions)
            throw DefinitionError("too many propositions (max " +
                                  std::to_string(kMaxPropositions) + ")");
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (symbols_[i].empty()) throw DefinitionError("empty proposition name");
            for (std::size_t j = i + 1; j < symbols_.size(); ++j)
                if (symbols_[i] == symbols_[j])
                    throw DefinitionError("duplicate proposition: " + symbols_[i]);
        }
    }

    std::size_t size() const { return symbols_.size(); }
    const std::vector<std::string>& symbols() const { return symbols_; }
    const std::string& name(std::size_t bit) const { return symbols_.at(bit); }

    std::optional<std::size_t> find(const std::string& symbol) const {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i] == symbol) return i;
        return std::nullopt;
    }

    Label label_of(const std::vector<std::string>& subset) const {
        Label mask = 0;
        for (const auto& s : subset) {
            auto bit = find(s);
            if (!bit) throw DefinitionError("unknown proposition: " + s);
            mask |= Label{1} << *bit;
        }
        return mask;
    }

    std::vector<std::string> symbols_of(Label mask) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (mask & (Label{1} << i)) out.push_back(symbols_[i]);
        return out;
    }

    // Number of distinct labels, |2^Delta|.
    std::size_t label_count() const { return std::size_t{1} << symbols_.size(); }

    bool operator==(const PropositionSet& o) const { return symbols_ == o.symbols_; }

private:
    std::vector<std::string> symbols_;
};

inline bool has_bit(Label mask, std::size_t bit) { return (mask >> bit) & 1u; }

}  // namespace prmrl
