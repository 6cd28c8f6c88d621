#include "slr/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "slr/errors.hpp"

namespace slr {

namespace {

constexpr char kBinMagic[4] = {'S', 'L', 'R', 'C'};

static_assert(std::endian::native == std::endian::little,
              "file readers/writers assume a little-endian host");

Label label_from_int(long v, const std::string& where) {
    switch (v) {
        case 0: return Label::ground;
        case 1: return Label::non_ground;
        case 2: return Label::unlabeled;
        default: throw IoError("unknown label token '" + std::to_string(v) + "' " + where);
    }
}

// ---------------------------------------------------------------- labeled_csv

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t line_no, const std::string& path) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw IoError("malformed record at " + path + ":" + std::to_string(line_no));
    return value;
}

PointCloud load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw IoError("missing header in " + path.string());
    ++line_no;
    {
        std::string header(trim(line));
        header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
        if (header != "x,y,z,label")
            throw IoError("bad csv header in " + path.string() + ", expected x,y,z,label");
    }

    PointCloud cloud;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        std::array<std::string_view, 4> fields;
        std::size_t n_fields = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= sv.size(); ++i) {
            if (i == sv.size() || sv[i] == ',') {
                if (n_fields >= 4)
                    throw IoError("malformed record at " + path.string() + ":" + std::to_string(line_no));
                fields[n_fields++] = sv.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n_fields != 4)
            throw IoError("malformed record at " + path.string() + ":" + std::to_string(line_no));

        LabeledPoint p;
        p.x = parse_double(fields[0], line_no, path.string());
        p.y = parse_double(fields[1], line_no, path.string());
        p.z = parse_double(fields[2], line_no, path.string());
        const auto lf = trim(fields[3]);
        long lv = 0;
        const auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), lv);
        if (ec != std::errc() || ptr != lf.data() + lf.size())
            throw IoError("unknown label token at " + path.string() + ":" + std::to_string(line_no));
        p.label = label_from_int(lv, "at " + path.string() + ":" + std::to_string(line_no));
        cloud.points.push_back(p);
    }
    return cloud;
}

void store_csv(const PointCloud& cloud, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw IoError("cannot write " + path.string());
    std::fputs("x,y,z,label\n", f);
    for (const auto& p : cloud.points) {
        // %.17g round-trips doubles exactly.
        std::fprintf(f, "%.17g,%.17g,%.17g,%d\n", p.x, p.y, p.z, static_cast<int>(p.label));
    }
    if (std::fclose(f) != 0) throw IoError("error writing " + path.string());
}

// ------------------------------------------------------------------------ bin

PointCloud load_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kBinMagic, 4) != 0)
        throw IoError("bad magic in " + path.string());
    std::uint64_t count = 0;
    if (!in.read(reinterpret_cast<char*>(&count), 8))
        throw IoError("truncated header in " + path.string());

    constexpr std::size_t kRecord = 3 * 8 + 1;
    PointCloud cloud;
    cloud.points.resize(count);
    std::vector<char> buf(kRecord * 65536);
    std::size_t i = 0;
    while (i < count) {
        const std::size_t chunk = std::min<std::size_t>(count - i, 65536);
        if (!in.read(buf.data(), static_cast<std::streamsize>(chunk * kRecord)))
            throw IoError("truncated record " + std::to_string(i) + " in " + path.string());
        const char* src = buf.data();
        for (std::size_t k = 0; k < chunk; ++k, ++i) {
            LabeledPoint& p = cloud.points[i];
            std::memcpy(&p.x, src, 8);
            std::memcpy(&p.y, src + 8, 8);
            std::memcpy(&p.z, src + 16, 8);
            const unsigned char lv = static_cast<unsigned char>(src[24]);
            p.label = label_from_int(lv, "in record " + std::to_string(i) + " of " + path.string());
            src += kRecord;
        }
    }
    return cloud;
}

void store_bin(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kBinMagic, 4);
    const std::uint64_t count = cloud.points.size();
    out.write(reinterpret_cast<const char*>(&count), 8);

    constexpr std::size_t kRecord = 3 * 8 + 1;
    std::vector<char> buf(kRecord * 65536);
    std::size_t i = 0;
    while (i < count) {
        const std::size_t chunk = std::min<std::size_t>(count - i, 65536);
        char* dst = buf.data();
        for (std::size_t k = 0; k < chunk; ++k, ++i) {
            const LabeledPoint& p = cloud.points[i];
            std::memcpy(dst, &p.x, 8);
            std::memcpy(dst + 8, &p.y, 8);
            std::memcpy(dst + 16, &p.z, 8);
            dst[24] = static_cast<char>(p.label);
            dst += kRecord;
        }
        out.write(buf.data(), static_cast<std::streamsize>(chunk * kRecord));
    }
    if (!out) throw IoError("error writing " + path.string());
}

// ------------------------------------------------------------------------ ply

struct PlyProperty {
    std::string name;
    std::string type;
    std::size_t size = 0;
};

std::size_t ply_type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    return 0;
}

PointCloud load_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || trim(line) != "ply")
        throw IoError("not a ply file: " + path.string());

    bool binary = false;
    std::size_t vertex_count = 0;
    std::vector<PlyProperty> props;
    bool in_vertex_element = false;
    bool saw_format = false;

    while (std::getline(in, line)) {
        std::istringstream ls{std::string(trim(line))};
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw IoError("unsupported ply format '" + fmt + "' in " + path.string());
            saw_format = true;
        } else if (tok == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name == "vertex") {
                vertex_count = count;
                in_vertex_element = true;
            } else {
                if (count != 0)
                    throw IoError("unsupported ply element '" + name + "' in " + path.string());
                in_vertex_element = false;
            }
        } else if (tok == "property") {
            if (!in_vertex_element) continue;
            PlyProperty p;
            ls >> p.type;
            if (p.type == "list")
                throw IoError("list properties are not supported: " + path.string());
            ls >> p.name;
            p.size = ply_type_size(p.type);
            if (p.size == 0)
                throw IoError("unsupported ply property type '" + p.type + "' in " + path.string());
            props.push_back(p);
        } else if (tok == "end_header") {
            break;
        } else {
            throw IoError("unexpected ply header line '" + std::string(trim(line)) + "' in " + path.string());
        }
    }
    if (!saw_format) throw IoError("ply header missing format line: " + path.string());

    int ix = -1, iy = -1, iz = -1, il = -1;
    for (std::size_t i = 0; i < props.size(); ++i) {
        const auto& p = props[i];
        if (p.name == "x") ix = static_cast<int>(i);
        else if (p.name == "y") iy = static_cast<int>(i);
        else if (p.name == "z") iz = static_cast<int>(i);
        else if (p.name == "label") il = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw IoError("ply file lacks x/y/z vertex properties: " + path.string());
    for (int idx : {ix, iy, iz}) {
        const auto& t = props[static_cast<std::size_t>(idx)].type;
        if (t != "float" && t != "float32" && t != "double" && t != "float64")
            throw IoError("x/y/z must be float or double in " + path.string());
    }
    if (il >= 0) {
        const auto& t = props[static_cast<std::size_t>(il)].type;
        if (t != "uchar" && t != "uint8")
            throw IoError("label property must be uchar in " + path.string());
    }

    PointCloud cloud;
    cloud.points.resize(vertex_count);

    if (binary) {
        std::size_t record = 0;
        for (const auto& p : props) record += p.size;
        std::vector<char> buf(record);
        for (std::size_t i = 0; i < vertex_count; ++i) {
            if (!in.read(buf.data(), static_cast<std::streamsize>(record)))
                throw IoError("truncated vertex " + std::to_string(i) + " in " + path.string());
            std::size_t off = 0;
            LabeledPoint& pt = cloud.points[i];
            for (std::size_t k = 0; k < props.size(); ++k) {
                const auto& p = props[k];
                const int ki = static_cast<int>(k);
                if (ki == ix || ki == iy || ki == iz) {
                    double v = 0.0;
                    if (p.size == 4) {
                        float f;
                        std::memcpy(&f, buf.data() + off, 4);
                        v = f;
                    } else {
                        std::memcpy(&v, buf.data() + off, 8);
                    }
                    if (ki == ix) pt.x = v;
                    else if (ki == iy) pt.y = v;
                    else pt.z = v;
                } else if (ki == il) {
                    pt.label = label_from_int(static_cast<unsigned char>(buf[off]),
                                              "in vertex " + std::to_string(i) + " of " + path.string());
                }
                off += p.size;
            }
            if (il < 0) pt.label = Label::unlabeled;
        }
    } else {
        std::size_t line_no = 0;
        for (std::size_t i = 0; i < vertex_count; ++i) {
            if (!std::getline(in, line))
                throw IoError("truncated vertex " + std::to_string(i) + " in " + path.string());
            ++line_no;
            std::istringstream ls{line};
            LabeledPoint& pt = cloud.points[i];
            for (std::size_t k = 0; k < props.size(); ++k) {
                const int ki = static_cast<int>(k);
                if (ki == ix || ki == iy || ki == iz) {
                    double v;
                    if (!(ls >> v))
                        throw IoError("malformed record at vertex " + std::to_string(i) + " in " + path.string());
                    if (ki == ix) pt.x = v;
                    else if (ki == iy) pt.y = v;
                    else pt.z = v;
                } else if (ki == il) {
                    long lv;
                    if (!(ls >> lv))
                        throw IoError("malformed record at vertex " + std::to_string(i) + " in " + path.string());
                    pt.label = label_from_int(lv, "at vertex " + std::to_string(i) + " of " + path.string());
                } else {
                    std::string skip;
                    if (!(ls >> skip))
                        throw IoError("malformed record at vertex " + std::to_string(i) + " in " + path.string());
                }
            }
            if (il < 0) pt.label = Label::unlabeled;
        }
    }
    return cloud;
}

void store_ply(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "ply\n"
        << "format binary_little_endian 1.0\n"
        << "element vertex " << cloud.points.size() << "\n"
        << "property double x\n"
        << "property double y\n"
        << "property double z\n"
        << "property uchar label\n"
        << "end_header\n";
    constexpr std::size_t kRecord = 3 * 8 + 1;
    std::vector<char> buf(kRecord);
    for (const auto& p : cloud.points) {
        std::memcpy(buf.data(), &p.x, 8);
        std::memcpy(buf.data() + 8, &p.y, 8);
        std::memcpy(buf.data() + 16, &p.z, 8);
        buf[24] = static_cast<char>(p.label);
        out.write(buf.data(), kRecord);
    }
    if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

Format parse_format(const std::string& name) {
    if (name == "labeled_csv" || name == "csv") return Format::labeled_csv;
    if (name == "ply") return Format::ply;
    if (name == "bin") return Format::bin;
    throw ConfigError("unknown format '" + name + "'");
}

std::string format_name(Format f) {
    switch (f) {
        case Format::labeled_csv: return "labeled_csv";
        case Format::ply: return "ply";
        case Format::bin: return "bin";
    }
    return "?";
}

Format format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return Format::labeled_csv;
    if (ext == ".ply") return Format::ply;
    if (ext == ".bin") return Format::bin;
    throw ConfigError("cannot infer format from extension '" + ext + "'");
}

PointCloud load_cloud(const std::filesystem::path& path, Format format) {
    switch (format) {
        case Format::labeled_csv: return load_csv(path);
        case Format::ply: return load_ply(path);
        case Format::bin: return load_bin(path);
    }
    throw ConfigError("bad format enum");
}

void store_cloud(const PointCloud& cloud, const std::filesystem::path& path, Format format) {
    switch (format) {
        case Format::labeled_csv: store_csv(cloud, path); return;
        case Format::ply: store_ply(cloud, path); return;
        case Format::bin: store_bin(cloud, path); return;
    }
    throw ConfigError("bad format enum");
}

}  // namespace slr
