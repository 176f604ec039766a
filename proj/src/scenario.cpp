#include "v2v/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "v2v/seed.hpp"

namespace v2v {

namespace {

std::vector<std::string> split_fields(std::string_view line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

double parse_number(const std::string& field, std::size_t line_no)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != field.size() || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": '" + field + "' is not a finite number");
    return v;
}

// Checks square shape, symmetry within tolerance and positive off-diagonals,
// then copies the upper triangle over the lower one.
DistanceMatrix validated(MatrixXr d)
{
    const Eigen::Index n = d.rows();
    if (n < 2)
        throw ParseError("distance matrix needs at least two vehicles");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j)
                continue;
            if (!(d(i, j) > 0.0))
                throw PositivityError("distance (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") is not positive");
            if (j > i && std::abs(d(i, j) - d(j, i)) > kSymmetryTolM)
                throw AsymmetryError("distance (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") differs from its transpose");
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            d(i, j) = d(j, i);
    return DistanceMatrix(std::move(d));
}

Scene parse_plain(std::string_view text)
{
    std::vector<std::vector<double>> rows;
    std::optional<std::size_t> declared_n;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto fields = split_fields(line);
        if (fields.empty())
            continue;
        if (rows.empty() && !declared_n && fields.size() == 1) {
            const double n = parse_number(fields[0], line_no);
            if (n < 2 || n != std::floor(n))
                throw ParseError("line " + std::to_string(line_no) + ": header must be an integer n >= 2");
            declared_n = static_cast<std::size_t>(n);
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields)
            row.push_back(parse_number(f, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("no matrix rows found");
    const std::size_t n = rows.size();
    if (declared_n && *declared_n != n)
        throw ParseError("header declares n=" + std::to_string(*declared_n) + " but found " +
                         std::to_string(n) + " rows");
    MatrixXr d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw ParseError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                             " entries, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j)
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return Scene{validated(std::move(d)), {}};
}

Scene parse_json(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON scene: ") + e.what());
    }
    try {
        Scene scene;
        if (doc.contains("coordinates")) {
            for (const auto& p : doc.at("coordinates")) {
                if (p.size() != 2)
                    throw ParseError("coordinates must be [x, y] pairs");
                scene.coords.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            }
            for (std::size_t a = 0; a < scene.coords.size(); ++a)
                for (std::size_t b = a + 1; b < scene.coords.size(); ++b)
                    if (scene.coords[a].x == scene.coords[b].x && scene.coords[a].y == scene.coords[b].y)
                        throw PositivityError("vehicles " + std::to_string(a) + " and " +
                                              std::to_string(b) + " share a position");
            if (scene.coords.size() < 2)
                throw ParseError("need at least two coordinates");
            scene.dist = distances_from_coordinates(scene.coords);
        } else if (doc.contains("distances")) {
            const auto& rows = doc.at("distances");
            const auto n = static_cast<Eigen::Index>(rows.size());
            MatrixXr d(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto& row = rows.at(static_cast<std::size_t>(i));
                if (static_cast<Eigen::Index>(row.size()) != n)
                    throw ParseError("distance matrix must be square");
                for (Eigen::Index j = 0; j < n; ++j)
                    d(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
            }
            scene.dist = validated(std::move(d));
        } else {
            throw ParseError("JSON scene needs a \"coordinates\" or \"distances\" key");
        }
        if (doc.contains("n") && doc.at("n").get<Eigen::Index>() != scene.dist.size())
            throw ParseError("\"n\" does not match the scene size");
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON scene: ") + e.what());
    }
}

}  // namespace

void ScenarioSpec::validate() const
{
    if (!(min_separation_m > 0.0))
        throw DomainError("scenario: min separation must be positive");
    if (const auto* box = std::get_if<RandomBoxPlacement>(&placement)) {
        if (n_vehicles < 2)
            throw DomainError("scenario: need at least two vehicles");
        if (n_vehicles > static_cast<std::size_t>(kMaxVehicles))
            throw CapacityError("scenario: too many vehicles");
        if (!(box->side_m > 2.0 * min_separation_m))
            throw DomainError("scenario: box side must exceed twice the min separation");
    }
}

DistanceMatrix distances_from_coordinates(std::span<const Point2> coords)
{
    const auto n = static_cast<Eigen::Index>(coords.size());
    MatrixXr d = MatrixXr::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& a = coords[static_cast<std::size_t>(i)];
            const auto& b = coords[static_cast<std::size_t>(j)];
            d(i, j) = d(j, i) = std::hypot(a.x - b.x, a.y - b.y);
        }
    }
    return DistanceMatrix(std::move(d));
}

Scene parse_scene(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{')
        return parse_json(text);
    return parse_plain(text);
}

Scene load_scene(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open scene file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scene(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path)
{
    return load_scene(path).dist;
}

std::string format_distance_matrix(const DistanceMatrix& dist)
{
    std::string out = std::to_string(dist.size()) + "\n";
    char buf[32];
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
        for (Eigen::Index j = 0; j < dist.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", dist(i, j));
            if (j > 0)
                out.push_back(' ');
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

void save_distance_matrix(const DistanceMatrix& dist, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << format_distance_matrix(dist);
}

Scene generate_scene(const ScenarioSpec& spec)
{
    spec.validate();
    if (const auto* file = std::get_if<FilePlacement>(&spec.placement))
        return load_scene(file->path);
    if (const auto* fixed = std::get_if<FixedPlacement>(&spec.placement)) {
        if (fixed->coords.size() < 2)
            throw DomainError("scenario: need at least two coordinates");
        return Scene{distances_from_coordinates(fixed->coords), fixed->coords};
    }

    const auto& box = std::get<RandomBoxPlacement>(spec.placement);
    Rng rng(spec.rng_seed);
    std::vector<Point2> coords;
    coords.reserve(spec.n_vehicles);
    std::size_t attempts = 0;
    while (coords.size() < spec.n_vehicles) {
        if (++attempts > kMaxPlacementAttempts)
            throw PackingError("could not place " + std::to_string(spec.n_vehicles) +
                               " vehicles with separation " + std::to_string(spec.min_separation_m) +
                               " m in " + std::to_string(kMaxPlacementAttempts) + " attempts");
        const Point2 p{uniform01(rng) * box.side_m, uniform01(rng) * box.side_m};
        bool clear = true;
        for (const auto& q : coords)
            if (std::hypot(p.x - q.x, p.y - q.y) < spec.min_separation_m)
                clear = false;
        if (clear)
            coords.push_back(p);
    }
    return Scene{distances_from_coordinates(coords), std::move(coords)};
}

}  // namespace v2v
