#include "bolab/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace bolab {

IoError::IoError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

void ensure_parent(const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    ensure_parent(path);
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + t + "'");
    }
    if (used != t.size()) throw std::invalid_argument("not a number: '" + t + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number: '" + t + "'");
    return v;
}

// Binary helpers: values are stored little-endian whatever the host order.
template <class U>
void put_le(std::ostream& os, U v) {
    unsigned char b[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <class U>
U get_le(std::istream& is, const std::string& what) {
    unsigned char b[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(U))) throw IoError("truncated binary field while reading " + what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is, const std::string& what) { return std::bit_cast<double>(get_le<std::uint64_t>(is, what)); }

constexpr char kMagic[8] = {'B', 'O', 'L', 'A', 'B', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

void write_header(std::ostream& os, std::uint32_t kind, const Grid& g) {
    os.write(kMagic, 8);
    put_le<std::uint32_t>(os, kVersion);
    put_le<std::uint32_t>(os, kind);
    put_f64(os, g.half_length());
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.size()));
}

struct Header {
    std::uint32_t kind;
    Grid grid;
};

Header read_header(std::istream& is, const std::string& name) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw IoError(name + ": not a bolab binary field");
    const auto version = get_le<std::uint32_t>(is, "version");
    if (version != kVersion) throw IoError(name + ": unsupported format version " + std::to_string(version));
    const auto kind = get_le<std::uint32_t>(is, "kind");
    if (kind > 1) throw IoError(name + ": unknown field kind " + std::to_string(kind));
    const double L = get_f64(is, "L");
    const auto n = get_le<std::uint64_t>(is, "n");
    try {
        return {kind, Grid::make(L, static_cast<std::size_t>(n))};
    } catch (const std::exception& e) {
        throw IoError(name + ": bad grid in header: " + e.what());
    }
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw IoError("cannot open " + path.string());
    return is;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') throw std::invalid_argument("unterminated list");
        t = trim(t.substr(1, t.size() - 2));
    }
    if (t.empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
    if (t.back() == ',') throw std::invalid_argument("trailing comma in list");
    return out;
}

void write_field_text(const std::filesystem::path& path, const RealField& u) {
    auto os = open_out(path);
    const Grid& g = u.grid();
    os << std::setprecision(17) << "# bolab-field L=" << g.half_length() << " n=" << g.size() << "\n";
    for (std::size_t i = 0; i < u.size(); ++i) os << g.x(i) << " " << u[i] << "\n";
    if (!os) throw IoError("write failed: " + path.string());
}

RealField read_field_text(const std::filesystem::path& path) {
    auto is = open_in(path);
    const std::string name = path.string();
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw IoError(name, 1, "empty file");
    ++lineno;
    double L = 0.0;
    std::size_t n = 0;
    {
        std::istringstream hs(line);
        std::string hash, tag, lpart, npart;
        hs >> hash >> tag >> lpart >> npart;
        if (hash != "#" || tag != "bolab-field" || lpart.rfind("L=", 0) != 0 || npart.rfind("n=", 0) != 0)
            throw IoError(name, 1, "expected header '# bolab-field L=<L> n=<n>'");
        try {
            L = parse_real(lpart.substr(2));
            const double nn = parse_real(npart.substr(2));
            if (nn < 0 || nn != std::floor(nn)) throw std::invalid_argument("n must be a whole number");
            n = static_cast<std::size_t>(nn);
        } catch (const std::exception& e) {
            throw IoError(name, 1, e.what());
        }
    }
    Grid g;
    try {
        g = Grid::make(L, n);
    } catch (const std::exception& e) {
        throw IoError(name, 1, e.what());
    }
    std::vector<double> values;
    values.reserve(n);
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::istringstream ls(t);
        std::string xs, vs, extra;
        ls >> xs >> vs;
        if (vs.empty() || (ls >> extra)) throw IoError(name, lineno, "expected two columns 'x value'");
        try {
            const double x = parse_real(xs);
            const double v = parse_real(vs);
            const std::size_t i = values.size();
            if (i >= n) throw std::invalid_argument("more samples than the header's n");
            if (std::abs(x - g.x(i)) > 1e-9 * (1.0 + std::abs(g.x(i))))
                throw std::invalid_argument("x does not match grid point " + std::to_string(i));
            values.push_back(v);
        } catch (const std::invalid_argument& e) {
            throw IoError(name, lineno, e.what());
        }
    }
    if (values.size() != n)
        throw IoError(name, lineno, "expected " + std::to_string(n) + " samples, found " + std::to_string(values.size()));
    return RealField(g, std::move(values));
}

void write_field_binary(const std::filesystem::path& path, const RealField& u) {
    auto os = open_out(path, true);
    write_header(os, 0, u.grid());
    for (double v : u) put_f64(os, v);
    if (!os) throw IoError("write failed: " + path.string());
}

void write_field_binary(const std::filesystem::path& path, const ComplexField& u) {
    auto os = open_out(path, true);
    write_header(os, 1, u.grid());
    for (const cplx& v : u) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os) throw IoError("write failed: " + path.string());
}

RealField read_field_binary(const std::filesystem::path& path) {
    auto is = open_in(path, true);
    const Header h = read_header(is, path.string());
    if (h.kind != 0) throw IoError(path.string() + ": holds a complex field");
    std::vector<double> v(h.grid.size());
    for (auto& x : v) x = get_f64(is, "samples");
    try {
        return RealField(h.grid, std::move(v));
    } catch (const std::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

ComplexField read_complex_field_binary(const std::filesystem::path& path) {
    auto is = open_in(path, true);
    const Header h = read_header(is, path.string());
    if (h.kind != 1) throw IoError(path.string() + ": holds a real field");
    std::vector<cplx> v(h.grid.size());
    for (auto& x : v) {
        const double re = get_f64(is, "samples");
        const double im = get_f64(is, "samples");
        x = cplx(re, im);
    }
    try {
        return ComplexField(h.grid, std::move(v));
    } catch (const std::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

SolitonParams parse_soliton_params(const std::string& text, const std::string& source) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::pair<std::string, std::size_t>> seen;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw IoError(source, lineno, "expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key != "speeds" && key != "phases" && key != "t") throw IoError(source, lineno, "unknown key '" + key + "'");
        if (seen.count(key)) throw IoError(source, lineno, "repeated key '" + key + "'");
        seen[key] = {value, lineno};
    }
    if (!seen.count("speeds")) throw IoError(source, lineno == 0 ? 1 : lineno, "missing key 'speeds'");

    auto list = [&](const std::string& key) {
        const auto& [value, at] = seen.at(key);
        const std::string t = trim(value);
        if (t.empty() || t.front() != '[' || t.back() != ']')
            throw IoError(source, at, "'" + key + "' must be a bracketed list like [1, 2]");
        try {
            return parse_real_list(t);
        } catch (const std::invalid_argument& e) {
            throw IoError(source, at, e.what());
        }
    };
    std::vector<double> speeds = list("speeds");
    std::vector<double> phases = seen.count("phases") ? list("phases") : std::vector<double>(speeds.size(), 0.0);
    double t = 0.0;
    if (seen.count("t")) {
        try {
            t = parse_real(seen.at("t").first);
        } catch (const std::invalid_argument& e) {
            throw IoError(source, seen.at("t").second, e.what());
        }
    }
    if (phases.size() != speeds.size()) throw IoError(source, seen.at("phases").second, "phases and speeds differ in length");
    try {
        return SolitonParams::make(speeds, phases, t);
    } catch (const std::invalid_argument& e) {
        throw IoError(source, seen.at("speeds").second, e.what());
    }
}

SolitonParams read_soliton_params(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_soliton_params(ss.str(), path.string());
}

void write_tower_csv(const std::filesystem::path& path, const ConservedTower& t) {
    auto os = open_out(path);
    os << std::setprecision(17) << "n,H_n,im_residue\n";
    for (std::size_t k = 0; k < t.values.size(); ++k) os << k << "," << t.values[k] << "," << t.imag_residue[k] << "\n";
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& eigenvalues) {
    auto os = open_out(path);
    os << std::setprecision(17) << "index,eigenvalue\n";
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) os << k << "," << eigenvalues[k] << "\n";
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& conserved, const std::vector<double>& distances) {
    if (conserved.size() != times.size()) throw std::invalid_argument("trace columns differ in length");
    auto os = open_out(path);
    os << std::setprecision(17) << "t,H0,H1,H2,H3,distance\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        os << times[k];
        for (std::size_t m = 0; m < 4; ++m) {
            os << ",";
            if (m < conserved[k].size()) os << conserved[k][m];
        }
        os << ",";
        if (k < distances.size()) os << distances[k];
        os << "\n";
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto os = open_out(path);
    os << doc.dump(2) << "\n";
    if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace bolab
