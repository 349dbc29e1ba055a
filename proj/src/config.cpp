#include "qgbasin/config.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qgbasin/io.hpp"

namespace qgbasin {

namespace {

constexpr std::array kKnownKeys = {
    "Lx", "Ly", "Mx", "My", "padded_nx", "padded_ny",
    "beta", "nu", "r",
    "period", "force",
    "dt", "t_end", "record_every", "cfl_safety",
    "initial",
    "diagnostics", "checkpoint", "summary",
    "tol", "max_iter", "krylov_dim", "power_iters", "epsilon",
    "mode_m", "mode_n", "steps_per_period",
};

struct Entry {
    std::string value;
    int line = 0;
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) {
        words.push_back(w);
    }
    return words;
}

bool known(const std::string& key)
{
    return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

std::optional<double> to_double(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<long long> to_int(const std::string& s)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    double real(const std::string& key, std::optional<double> fallback,
                const std::function<bool(double)>& ok, const char* range) const
    {
        if (!has(key)) {
            if (!fallback) {
                throw ConfigError(key, 0, "missing required key");
            }
            return *fallback;
        }
        const Entry& e = entries_.at(key);
        const auto v = to_double(e.value);
        if (!v) {
            throw ConfigError(key, e.line, "expected a real number, got '" + e.value + "'");
        }
        if (!ok(*v)) {
            throw ConfigError(key, e.line, std::string("value out of range: must be ") + range);
        }
        return *v;
    }

    int integer(const std::string& key, std::optional<int> fallback, long long lo, const char* range) const
    {
        if (!has(key)) {
            if (!fallback) {
                throw ConfigError(key, 0, "missing required key");
            }
            return *fallback;
        }
        const Entry& e = entries_.at(key);
        const auto v = to_int(e.value);
        if (!v) {
            throw ConfigError(key, e.line, "expected an integer, got '" + e.value + "'");
        }
        if (*v < lo || *v > 1'000'000'000LL) {
            throw ConfigError(key, e.line, std::string("value out of range: must be ") + range);
        }
        return static_cast<int>(*v);
    }

    std::optional<std::string> text(const std::string& key) const
    {
        if (!has(key)) {
            return std::nullopt;
        }
        return entries_.at(key).value;
    }

private:
    std::map<std::string, Entry> entries_;
};

auto positive = [](double v) { return v > 0.0; };
auto non_negative = [](double v) { return v >= 0.0; };

InitialCondition parse_initial(const std::string& value, int line)
{
    const auto words = split_words(value);
    InitialCondition ic;
    auto bad = [&](const std::string& why) { return ConfigError("initial", line, why); };
    if (words.empty()) {
        throw bad("empty initial condition");
    }
    const std::string& kind = words[0];
    if (kind == "zero") {
        if (words.size() != 1) {
            throw bad("'zero' takes no arguments");
        }
        ic.kind = InitialCondition::Kind::zero;
    } else if (kind == "single_mode") {
        if (words.size() != 4) {
            throw bad("expected 'single_mode m n amplitude'");
        }
        const auto m = to_int(words[1]);
        const auto n = to_int(words[2]);
        const auto a = to_double(words[3]);
        if (!m || !n || !a || *m < 1 || *n < 1) {
            throw bad("expected 'single_mode m n amplitude' with m, n >= 1");
        }
        ic.kind = InitialCondition::Kind::single_mode;
        ic.m = static_cast<int>(*m);
        ic.n = static_cast<int>(*n);
        ic.amplitude = *a;
    } else if (kind == "file") {
        if (words.size() != 2) {
            throw bad("expected 'file path'");
        }
        ic.kind = InitialCondition::Kind::file;
        ic.path = words[1];
        if (!std::filesystem::exists(ic.path)) {
            throw bad("file does not exist: " + words[1]);
        }
    } else if (kind == "random") {
        if (words.size() != 3) {
            throw bad("expected 'random seed amplitude'");
        }
        const auto seed = to_int(words[1]);
        const auto a = to_double(words[2]);
        if (!seed || *seed < 0 || !a || *a < 0.0) {
            throw bad("expected 'random seed amplitude' with seed >= 0 and amplitude >= 0");
        }
        ic.kind = InitialCondition::Kind::random;
        ic.seed = static_cast<std::uint64_t>(*seed);
        ic.amplitude = *a;
    } else {
        throw bad("unknown initial condition kind '" + kind + "'");
    }
    return ic;
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "key '" + key
                         + "': " + message),
      key_(std::move(key)), line_(line)
{
}

RunConfig parse_config(std::string_view text, const std::vector<std::pair<std::string, std::string>>& overrides)
{
    std::map<std::string, Entry> entries;
    std::vector<Entry> force_lines;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(trim(line), line_no, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known(key)) {
            throw ConfigError(key, line_no, "unknown key");
        }
        if (key == "force") {
            force_lines.push_back({value, line_no});
            continue;
        }
        if (entries.count(key) != 0) {
            throw ConfigError(key, line_no, "duplicate key (first set on line "
                                                + std::to_string(entries[key].line) + ")");
        }
        entries[key] = {value, line_no};
    }
    for (const auto& [key, value] : overrides) {
        if (!known(key)) {
            throw ConfigError(key, 0, "unknown key in override");
        }
        if (key == "force") {
            throw ConfigError(key, 0, "force terms cannot be overridden");
        }
        entries[key] = {trim(value), 0};
    }

    const Reader rd(std::move(entries));
    RunConfig cfg;

    const double lx = rd.real("Lx", std::nullopt, positive, "> 0");
    const double ly = rd.real("Ly", std::nullopt, positive, "> 0");
    const int mx = rd.integer("Mx", std::nullopt, 1, ">= 1");
    const int my = rd.integer("My", std::nullopt, 1, ">= 1");
    const int pnx = rd.integer("padded_nx", 2 * mx + 1, 2LL * mx + 1, ">= 2 Mx + 1");
    const int pny = rd.integer("padded_ny", 2 * my + 1, 2LL * my + 1, ">= 2 My + 1");
    cfg.domain = Domain(lx, ly, mx, my, pnx, pny);

    cfg.params.beta = rd.real("beta", std::nullopt, non_negative, ">= 0");
    cfg.params.nu = rd.real("nu", std::nullopt, non_negative, ">= 0");
    cfg.params.r = rd.real("r", std::nullopt, non_negative, ">= 0");

    if (!force_lines.empty() && !rd.has("period")) {
        throw ConfigError("period", 0, "missing required key (forcing terms are present)");
    }
    cfg.forcing.period = rd.real("period", 1.0, positive, "> 0");
    for (const Entry& e : force_lines) {
        const auto words = split_words(e.value);
        if (words.size() != 5) {
            throw ConfigError("force", e.line, "expected 'm n a_cos a_sin a_const'");
        }
        const auto m = to_int(words[0]);
        const auto n = to_int(words[1]);
        const auto ac = to_double(words[2]);
        const auto as = to_double(words[3]);
        const auto a0 = to_double(words[4]);
        if (!m || !n || !ac || !as || !a0) {
            throw ConfigError("force", e.line, "expected integers m n followed by three reals");
        }
        if (*m < 1 || *m > mx || *n < 1 || *n > my) {
            throw ConfigError("force", e.line, "mode outside the truncation");
        }
        cfg.forcing.terms.push_back({static_cast<int>(*m), static_cast<int>(*n), *ac, *as, *a0});
    }

    cfg.stepping.dt = rd.real("dt", std::nullopt, positive, "> 0");
    cfg.stepping.t_end = rd.real("t_end", 0.0, non_negative, ">= 0");
    cfg.stepping.record_every = rd.integer("record_every", 10, 1, ">= 1");
    cfg.stepping.cfl_safety = rd.real("cfl_safety", 0.5, [](double v) { return v > 0.0 && v <= 1.0; }, "in (0, 1]");

    if (const auto ic = rd.text("initial")) {
        cfg.initial = parse_initial(*ic, rd.line("initial"));
        if (cfg.initial.kind == InitialCondition::Kind::single_mode
            && (cfg.initial.m > mx || cfg.initial.n > my)) {
            throw ConfigError("initial", rd.line("initial"), "mode outside the truncation");
        }
    }

    if (const auto p = rd.text("diagnostics")) {
        cfg.diagnostics_path = *p;
    }
    if (const auto p = rd.text("checkpoint")) {
        cfg.checkpoint_path = *p;
    }
    if (const auto p = rd.text("summary")) {
        cfg.summary_path = *p;
    }

    cfg.tol = rd.real("tol", 1e-8, positive, "> 0");
    cfg.max_iter = rd.integer("max_iter", 200, 0, ">= 0");
    cfg.krylov_dim = rd.integer("krylov_dim", 20, 1, ">= 1");
    cfg.power_iters = rd.integer("power_iters", 50, 1, ">= 1");
    if (rd.has("epsilon")) {
        cfg.epsilon = rd.real("epsilon", std::nullopt, positive, "> 0");
    }
    cfg.mode_m = rd.integer("mode_m", 1, 1, ">= 1");
    cfg.mode_n = rd.integer("mode_n", 1, 1, ">= 1");
    cfg.steps_per_period = rd.integer("steps_per_period", 2000, 1, ">= 1");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

SpectralField make_initial_field(const RunConfig& config)
{
    const Domain& d = config.domain;
    const InitialCondition& ic = config.initial;
    switch (ic.kind) {
    case InitialCondition::Kind::zero:
        return SpectralField(d);
    case InitialCondition::Kind::single_mode: {
        SpectralField f(d);
        f(ic.m, ic.n) = ic.amplitude;
        return f;
    }
    case InitialCondition::Kind::random:
        return random_field(d, ic.seed, ic.amplitude);
    case InitialCondition::Kind::file: {
        const SpectralField loaded = read_field(ic.path);
        const Domain& s = loaded.domain();
        if (s.mx() != d.mx() || s.my() != d.my() || s.lx() != d.lx() || s.ly() != d.ly()) {
            throw ConfigError("initial", 0, "checkpoint geometry does not match the configured domain");
        }
        return SpectralField(d, {loaded.coeffs().begin(), loaded.coeffs().end()});
    }
    }
    return SpectralField(d);
}

}  // namespace qgbasin
