#include "prmrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace prmrl {

// --- office ------------------------------------------------------------------

OfficeMap OfficeMap::parse(const std::string& text) {
    OfficeMap map;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw ConfigError("office map is empty");
    map.height = static_cast<int>(rows.size());
    map.width = static_cast<int>(rows[0].size());
    int starts = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != map.width)
            throw ConfigError("office map is not rectangular");
        for (char ch : row) {
            if (std::string(".#ocmhtWB").find(ch) == std::string::npos)
                throw ConfigError(std::string("unknown map character '") + ch + "'");
            if (ch == 'o') ++starts;
        }
        map.cells += row;
    }
    if (starts != 1) throw ConfigError("office map needs exactly one start cell 'o'");
    return map;
}

OfficeMap OfficeMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open map file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

OfficeEnv::OfficeEnv(OfficeMap map) : map_(std::move(map)) {
    props_ = PropositionSet({"c", "m", "h", "t", "warm", "cold"});
    actions_.names = {"N", "S", "E", "W"};
    actions_.finite = {{0, -1}, {0, 1}, {1, 0}, {-1, 0}};  // (dcol, drow) per direction
    index_of_cell_.assign(static_cast<std::size_t>(map_.width) * map_.height, -1);
    for (int r = 0; r < map_.height; ++r)
        for (int c = 0; c < map_.width; ++c) {
            if (map_.at(r, c) == '#') continue;
            index_of_cell_[static_cast<std::size_t>(r) * map_.width + c] =
                static_cast<int>(cell_ids_.size());
            cell_ids_.emplace_back(r, c);
            if (map_.at(r, c) == 'o') {
                start_row_ = r;
                start_col_ = c;
            }
        }
}

std::vector<double> OfficeEnv::initial_state() const {
    return {static_cast<double>(start_col_), static_cast<double>(start_row_)};
}

std::pair<int, int> OfficeEnv::move(int row, int col, int dir) const {
    int nr = row, nc = col;
    switch (dir) {
        case kNorth: --nr; break;
        case kSouth: ++nr; break;
        case kEast: ++nc; break;
        case kWest: --nc; break;
        default: throw ConfigError("invalid office action");
    }
    if (map_.wall(nr, nc)) return {row, col};  // bump and stay
    return {nr, nc};
}

std::vector<double> OfficeEnv::step(const std::vector<double>& x, const Action& u,
                                    Rng& rng) const {
    const int col = static_cast<int>(x.at(0));
    const int row = static_cast<int>(x.at(1));
    if (map_.wall(row, col)) throw ConfigError("office state is a wall cell");
    if (stationary(row, col)) return x;

    // Chosen direction or either perpendicular, each with probability 1/3.
    static const int perps[4][2] = {{kWest, kEast},    // N
                                    {kEast, kWest},    // S
                                    {kNorth, kSouth},  // E
                                    {kSouth, kNorth}}; // W
    const int dir = u.index;
    if (dir < 0 || dir > 3) throw ConfigError("invalid office action index");
    const std::size_t branch = rng.index(3);
    const int actual = branch == 0 ? dir : perps[dir][branch - 1];
    const auto [nr, nc] = move(row, col, actual);
    return {static_cast<double>(nc), static_cast<double>(nr)};
}

Label OfficeEnv::label_of(const std::vector<double>& x) const {
    const int col = static_cast<int>(x.at(0));
    const int row = static_cast<int>(x.at(1));
    switch (map_.at(row, col)) {
        case 'c': return props_.label_of({"c"});
        case 'm': return props_.label_of({"m"});
        case 'h': return props_.label_of({"h"});
        case 't': return props_.label_of({"t"});
        case 'W': return props_.label_of({"warm"});
        case 'B': return props_.label_of({"cold"});
        default: return 0;
    }
}

Bounds OfficeEnv::state_bounds() const {
    return {{0.0, static_cast<double>(map_.width - 1)},
            {0.0, static_cast<double>(map_.height - 1)}};
}

std::size_t OfficeEnv::state_index(const std::vector<double>& x) const {
    const int col = static_cast<int>(x.at(0));
    const int row = static_cast<int>(x.at(1));
    const int id = index_of_cell_.at(static_cast<std::size_t>(row) * map_.width + col);
    if (id < 0) throw ConfigError("office state is a wall cell");
    return static_cast<std::size_t>(id);
}

std::vector<std::pair<std::size_t, double>> OfficeEnv::transition(std::size_t cell,
                                                                  int action) const {
    const auto [row, col] = cell_ids_.at(cell);
    std::vector<std::pair<std::size_t, double>> out;
    auto add = [&](std::size_t id, double p) {
        for (auto& [existing, prob] : out)
            if (existing == id) {
                prob += p;
                return;
            }
        out.emplace_back(id, p);
    };
    if (stationary(row, col)) {
        add(cell, 1.0);
        return out;
    }
    static const int perps[4][2] = {{kWest, kEast}, {kEast, kWest}, {kNorth, kSouth},
                                    {kSouth, kNorth}};
    const int dirs[3] = {action, perps[action][0], perps[action][1]};
    for (int d : dirs) {
        const auto [nr, nc] = move(row, col, d);
        add(static_cast<std::size_t>(
                index_of_cell_[static_cast<std::size_t>(nr) * map_.width + nc]),
            1.0 / 3.0);
    }
    return out;
}

// --- two-tank cascade ---------------------------------------------------------

namespace {
constexpr double kTankTau = 10.0;
constexpr double kTankBeta = 0.5 * kTankTau;
}  // namespace

TwoTankEnv::TwoTankEnv(NoiseSpec noise) : noise_(noise) {
    props_ = PropositionSet({"a", "b"});
    actions_.names = {"0", "1.5", "4.5", "7.5", "9"};
    actions_.finite = {{0.0}, {1.5}, {4.5}, {7.5}, {9.0}};
}

std::vector<double> TwoTankEnv::step(const std::vector<double>& x, const Action& u,
                                     Rng& rng) const {
    const double inflow =
        u.index >= 0 ? actions_.finite.at(static_cast<std::size_t>(u.index)).at(0) : u.value.at(0);
    const double b = kTankBeta;
    double x1 = std::sqrt(b * b + x.at(0) + kTankTau * inflow) - b;
    x1 = x1 * x1 + noise_.sample(rng);
    x1 = std::clamp(x1, 0.0, 100.0);
    double x2 = std::sqrt(b * b + x.at(1) + kTankTau * std::sqrt(x1)) - b;
    x2 = x2 * x2 + noise_.sample(rng);
    x2 = std::clamp(x2, 0.0, 100.0);
    return {x1, x2};
}

Label TwoTankEnv::label_of(const std::vector<double>& x) const {
    auto in = [&](double lo, double hi) {
        return x[0] >= lo && x[0] <= hi && x[1] >= lo && x[1] <= hi;
    };
    if (in(20, 70)) return props_.label_of({"b"});
    if (in(0, 0.5) || in(80, 100)) return props_.label_of({"a"});
    return 0;
}

// --- five-room temperature network ---------------------------------------------

namespace {
constexpr double kRoomSigma = 0.05;   // heater conduction
constexpr double kRoomBeta = 0.022;   // external conduction
constexpr double kRoomXi = 0.3;       // room-to-room conduction
constexpr double kRoomTh = 50.0;
constexpr double kRoomTe = -1.0;
}  // namespace

FiveRoomEnv::FiveRoomEnv(NoiseSpec noise) : noise_(noise) {
    props_ = PropositionSet({"a", "b", "c", "d"});
    actions_.box = {{0.0, 1.0}, {0.0, 1.0}};
}

std::vector<double> FiveRoomEnv::step(const std::vector<double>& x, const Action& u,
                                      Rng& rng) const {
    const double u1 = std::clamp(u.value.at(0), 0.0, 1.0);
    const double u3 = std::clamp(u.value.at(1), 0.0, 1.0);
    std::vector<double> next(5);
    for (int i = 0; i < 5; ++i) {
        const double gamma = x[(i + 1) % 5] + x[(i + 4) % 5];
        double v;
        if (i == 0 || i == 2) {
            const double ui = i == 0 ? u1 : u3;
            const double theta = 1.0 - kRoomBeta - 2.0 * kRoomXi - kRoomSigma * ui;
            v = theta * x[i] + kRoomSigma * kRoomTh * ui + kRoomXi * gamma + kRoomBeta * kRoomTe;
        } else {
            const double phi = 1.0 - kRoomBeta - 2.0 * kRoomXi;
            v = phi * x[i] + kRoomXi * gamma + kRoomBeta * kRoomTe;
        }
        v += noise_.sample(rng);
        next[i] = std::clamp(v, 15.0, 25.0);
    }
    return next;
}

Label FiveRoomEnv::label_of(const std::vector<double>& x) const {
    auto all = [&](double lo, double hi, bool lo_open, bool hi_open) {
        for (double v : x) {
            if (lo_open ? !(v > lo) : !(v >= lo)) return false;
            if (hi_open ? !(v < hi) : !(v <= hi)) return false;
        }
        return true;
    };
    if (all(15, 18.5, false, false) || all(21.5, 25, false, false))
        return props_.label_of({"a"});
    if (all(19.5, 20.5, false, false)) return props_.label_of({"b"});
    if (all(18.5, 19.5, true, true)) return props_.label_of({"c"});
    if (all(20.5, 21.5, true, true)) return props_.label_of({"d"});
    return 0;
}

// --- five-road traffic network ---------------------------------------------------

namespace {
constexpr double kRoadTv = 0.0018 * 100.0 / 0.5;  // tau * v / L = 0.36
constexpr double kRoadQ = 0.25;
}  // namespace

FiveRoadEnv::FiveRoadEnv(NoiseSpec noise) : noise_(noise) {
    props_ = PropositionSet({"a", "b", "c", "d"});
    actions_.box = {{0.0, 1.0}, {0.0, 1.0}};
}

std::vector<double> FiveRoadEnv::step(const std::vector<double>& x, const Action& u,
                                      Rng& rng) const {
    const double u1 = std::clamp(u.value.at(0), 0.0, 1.0);
    const double u3 = std::clamp(u.value.at(1), 0.0, 1.0);
    std::vector<double> next(5);
    for (int i = 0; i < 5; ++i) {
        const double gamma = x[(i + 4) % 5];  // upstream cell, x0 = x5
        double keep = 1.0 - kRoadTv;
        double inflow = 0.0;
        if (i == 0) inflow = 6.0 * u1;
        else if (i == 2) inflow = 8.0 * u3;
        else if (i == 1 || i == 3) keep = 1.0 - kRoadTv - kRoadQ;
        next[i] = keep * x[i] + kRoadTv * gamma + inflow + noise_.sample(rng);
    }
    return next;  // intentionally unclamped: leaving the box is the event a
}

Label FiveRoadEnv::label_of(const std::vector<double>& x) const {
    for (double v : x)
        if (v < 0.0 || v > 10.0) return props_.label_of({"a"});
    auto all = [&](double lo, double hi, bool open) {
        for (double v : x) {
            if (open ? !(v > lo && v < hi) : !(v >= lo && v <= hi)) return false;
        }
        return true;
    };
    if (all(1, 8, false)) return props_.label_of({"b"});
    if (all(0, 1, true)) return props_.label_of({"c"});
    if (all(8, 10, true)) return props_.label_of({"d"});
    return 0;
}

// --- toy 1-d drift ----------------------------------------------------------------

Toy1dEnv::Toy1dEnv(NoiseSpec noise) : noise_(noise) {
    props_ = PropositionSet({"b"});
    actions_.box = {{-1.0, 1.0}};
}

std::vector<double> Toy1dEnv::step(const std::vector<double>& x, const Action& u,
                                   Rng& rng) const {
    const double drift = std::clamp(u.value.at(0), -1.0, 1.0);
    return {std::clamp(x.at(0) + drift + noise_.sample(rng), 0.0, 10.0)};
}

Label Toy1dEnv::label_of(const std::vector<double>& x) const {
    if (x.at(0) >= 4.0 && x.at(0) <= 6.0) return props_.label_of({"b"});
    return 0;
}

// --- factory ------------------------------------------------------------------------

std::unique_ptr<EnvModel> make_env(const EnvConfig& config) {
    auto noise_off = [&](NoiseSpec spec) {
        spec.enabled = config.noise_enabled;
        return spec;
    };
    if (config.name == "office") {
        OfficeMap map = !config.map_text.empty() ? OfficeMap::parse(config.map_text)
                                                 : OfficeMap::load(config.map_path);
        return std::make_unique<OfficeEnv>(std::move(map));
    }
    if (config.name == "two_tank") return std::make_unique<TwoTankEnv>(noise_off({0.01, 0.01, true}));
    if (config.name == "five_room")
        return std::make_unique<FiveRoomEnv>(noise_off({0.01, 0.01, true}));
    if (config.name == "five_road")
        return std::make_unique<FiveRoadEnv>(noise_off({0.7, 0.7, true}));
    if (config.name == "toy_1d") return std::make_unique<Toy1dEnv>(noise_off({1.0, 0.0025, false}));
    throw ConfigError("unknown environment '" + config.name + "'");
}

}  // namespace prmrl
