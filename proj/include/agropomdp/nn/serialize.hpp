#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/gru.hpp"
#include "agropomdp/nn/mlp.hpp"

namespace agro::nn {

using QNetwork = std::variant<MlpNetwork, RecurrentQNetwork>;

inline constexpr const char* kModelHeader = "AGROPOMDP-MODEL v1";

/// A network plus the seed that initialised it.
struct SavedModel {
    QNetwork network;
    std::uint64_t init_seed = 0;
};

inline std::vector<std::span<const double>> parameters_of(const QNetwork& net) {
    return std::visit([](const auto& n) { return n.parameters(); }, net);
}

namespace detail {

inline void write_le(std::ostream& os, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(buf, 8);
}

inline double read_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

inline void write_dense(std::ostream& os, const MlpNetwork& mlp) {
    for (const auto& l : mlp.layers())
        os << "dense " << l.inputs() << ' ' << l.outputs() << ' ' << to_string(l.activation) << '\n';
}

}  // namespace detail

/// Header line, architecture descriptor (one line per layer), payload count,
/// then every parameter tensor row-major as little-endian float64 in
/// declaration order.
inline void save_model(std::ostream& os, const SavedModel& model) {
    os << kModelHeader << '\n';
    std::size_t count = 0;
    std::visit(
        [&](const auto& net) {
            using T = std::decay_t<decltype(net)>;
            if constexpr (std::is_same_v<T, MlpNetwork>) {
                os << "network mlp\n";
                os << "init scaled-uniform " << model.init_seed << '\n';
                detail::write_dense(os, net);
            } else {
                os << "network recurrent\n";
                os << "init scaled-uniform " << model.init_seed << '\n';
                os << "gru " << net.input_size() << ' ' << net.hidden_size() << '\n';
                detail::write_dense(os, net.head());
            }
            count = parameter_count(net);
        },
        model.network);
    os << "payload " << count << '\n';
    for (auto t : parameters_of(model.network))
        for (double v : t) detail::write_le(os, v);
}

inline SavedModel load_model(std::istream& is) {
    auto next_line = [&](const char* what) {
        std::string line;
        if (!std::getline(is, line)) throw DataError(std::string("model file truncated before ") + what);
        return line;
    };
    std::string header;
    if (!std::getline(is, header) || header != kModelHeader)
        throw DataError("unsupported model version: header '" + header.substr(0, 40) + "', expected '" +
                        kModelHeader + "'");

    std::string kind;
    {
        std::istringstream ls(next_line("network kind"));
        std::string key;
        ls >> key >> kind;
        if (key != "network" || (kind != "mlp" && kind != "recurrent"))
            throw DataError("model descriptor: bad network line");
    }
    SavedModel model;
    {
        std::istringstream ls(next_line("init line"));
        std::string key, scheme;
        ls >> key >> scheme >> model.init_seed;
        if (key != "init" || scheme != "scaled-uniform" || ls.fail()) throw DataError("model descriptor: bad init line");
    }

    std::size_t gru_in = 0, gru_hidden = 0;
    std::vector<DenseLayer> layers;
    std::size_t payload = 0;
    for (;;) {
        std::istringstream ls(next_line("payload"));
        std::string key;
        ls >> key;
        if (key == "payload") {
            ls >> payload;
            if (ls.fail()) throw DataError("model descriptor: bad payload line");
            break;
        }
        if (key == "gru") {
            if (kind != "recurrent" || !layers.empty() || gru_hidden != 0)
                throw DataError("model descriptor: unexpected gru line");
            ls >> gru_in >> gru_hidden;
            if (ls.fail() || gru_in == 0 || gru_hidden == 0) throw DataError("model descriptor: bad gru line");
        } else if (key == "dense") {
            std::size_t in = 0, out = 0;
            std::string act;
            ls >> in >> out >> act;
            if (ls.fail() || in == 0 || out == 0 || (act != "relu" && act != "identity"))
                throw DataError("model descriptor: bad dense line");
            layers.push_back({Matrix(out, in), Vector(out, 0.0), act == "relu" ? Activation::relu : Activation::identity});
        } else {
            throw DataError("model descriptor: unknown line '" + key + "'");
        }
    }

    try {
        if (kind == "mlp") {
            model.network = MlpNetwork(std::move(layers));
        } else {
            if (gru_hidden == 0) throw DataError("model descriptor: recurrent network without gru line");
            auto cell = GruCell::zeros(gru_in, gru_hidden);
            model.network = RecurrentQNetwork(std::move(cell), MlpNetwork(std::move(layers)));
        }
    } catch (const ShapeError& e) {
        throw DataError(std::string("model descriptor inconsistent: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("model descriptor inconsistent: ") + e.what());
    }

    const std::size_t expected = std::visit([](const auto& n) { return parameter_count(n); }, model.network);
    if (payload != expected)
        throw DataError("model payload declares " + std::to_string(payload) + " values but the architecture needs " +
                        std::to_string(expected));

    std::vector<unsigned char> bytes(expected * 8);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(is.gcount()) != bytes.size())
        throw DataError("model payload truncated: got " + std::to_string(is.gcount()) + " of " +
                        std::to_string(bytes.size()) + " bytes");
    if (is.peek() != std::char_traits<char>::eof()) throw DataError("model file has trailing bytes after payload");

    std::size_t pos = 0;
    std::visit(
        [&](auto& net) {
            for (auto t : net.parameters())
                for (auto& v : t) {
                    v = detail::read_le(bytes.data() + pos);
                    pos += 8;
                }
        },
        model.network);
    return model;
}

inline void save_model_file(const std::string& path, const SavedModel& model) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open model file for writing: " + path);
    save_model(os, model);
    if (!os) throw DataError("failed writing model file: " + path);
}

inline SavedModel load_model_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open model file: " + path);
    try {
        return load_model(is);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace agro::nn
