#include "lil/indexes.hpp"

#include <cstring>
#include <sstream>
#include <stdexcept>

namespace lil {

std::string IndexConfig::name() const { return to_string(kind); }

std::string IndexConfig::params() const {
    std::ostringstream os;
    switch (kind) {
        case IndexKind::Rmi:
            os << to_string(stage1) << "/" << to_string(stage2) << ",B=" << branching;
            break;
        case IndexKind::RadixSpline: os << "eps=" << epsilon << ",r=" << radix_bits; break;
        case IndexKind::Pgm: os << "eps=" << epsilon; break;
        case IndexKind::Rbs: os << "r=" << radix_bits; break;
        case IndexKind::Sampled: os << "k=" << stride; break;
        case IndexKind::Binary: os << "-"; break;
    }
    return os.str();
}

IndexVariant build_index(const SortedDataset& d, const IndexConfig& cfg) {
    switch (cfg.kind) {
        case IndexKind::Rmi: return train_rmi(d, {cfg.stage1, cfg.stage2, cfg.branching});
        case IndexKind::RadixSpline: return build_rs(d, cfg.epsilon, cfg.radix_bits);
        case IndexKind::Pgm: return build_pgm(d, cfg.epsilon);
        case IndexKind::Rbs: return build_rbs(d, cfg.radix_bits);
        case IndexKind::Sampled: return build_sampled(d, cfg.stride);
        case IndexKind::Binary: return build_binary_baseline(d);
    }
    throw std::invalid_argument("unknown index kind");
}

std::vector<std::uint8_t> index_to_blob(const IndexVariant& ix) {
    return std::visit([](const auto& i) { return to_blob(i); }, ix);
}

IndexVariant index_from_blob(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw std::runtime_error("index blob too short");
    char magic[5] = {};
    std::memcpy(magic, bytes.data(), 4);
    const std::string m(magic);
    if (m == "RMI1") return rmi_from_blob(bytes);
    if (m == "RSP1") return rs_from_blob(bytes);
    if (m == "PGM1") return pgm_from_blob(bytes);
    if (m == "RBX1") return rbs_from_blob(bytes);
    if (m == "SMP1") return sampled_from_blob(bytes);
    if (m == "BIN1") return binary_from_blob(bytes);
    throw std::runtime_error("unrecognized index blob magic: " + m);
}

std::string to_string(IndexKind kind) {
    switch (kind) {
        case IndexKind::Rmi: return "rmi";
        case IndexKind::RadixSpline: return "rs";
        case IndexKind::Pgm: return "pgm";
        case IndexKind::Rbs: return "rbs";
        case IndexKind::Sampled: return "sampled";
        case IndexKind::Binary: return "binary";
    }
    return "?";
}

IndexKind index_kind_from_string(const std::string& s) {
    if (s == "rmi") return IndexKind::Rmi;
    if (s == "rs") return IndexKind::RadixSpline;
    if (s == "pgm") return IndexKind::Pgm;
    if (s == "rbs") return IndexKind::Rbs;
    if (s == "sampled") return IndexKind::Sampled;
    if (s == "binary") return IndexKind::Binary;
    throw std::invalid_argument("unknown index kind: " + s);
}

std::string to_string(ModelKind kind) {
    return kind == ModelKind::Linear ? "linear" : "cubic";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "linear") return ModelKind::Linear;
    if (s == "cubic") return ModelKind::Cubic;
    throw std::invalid_argument("unknown model kind: " + s);
}

}  // namespace lil
