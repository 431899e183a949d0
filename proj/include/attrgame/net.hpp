#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "attrgame/matrix.hpp"

#include <json.hpp>

namespace attrgame {

enum class Activation { ReLU, Softplus, Gelu };

struct ActivationKind {
    Activation kind = Activation::ReLU;
    double theta = 1.0;  // Softplus temperature, > 0
};

struct DenseLayer {
    Matrix w;  // out x in
    Vec b;
    ActivationKind act;
};

// Node references are indices into the node chain: 0 is the input, k is the
// output of layers[k-1]. Dense, MaxPool and Attention consume node l-1;
// ResidualAdd names its two operands explicitly.
struct ResidualAddLayer {
    int left = -1;
    int right = -1;
};

struct MaxPoolLayer {
    std::vector<std::vector<int>> groups;  // partition of the producing node's indices
};

struct AttentionLayer {
    Matrix wq, wk, wv;  // D x d_h each
    int d_h = 1;
    int tokens = 1;
};

struct LayerSpec {
    std::variant<DenseLayer, ResidualAddLayer, MaxPoolLayer, AttentionLayer> node;

    bool is_dense() const { return std::holds_alternative<DenseLayer>(node); }
    bool is_add() const { return std::holds_alternative<ResidualAddLayer>(node); }
    bool is_maxpool() const { return std::holds_alternative<MaxPoolLayer>(node); }
    bool is_attention() const { return std::holds_alternative<AttentionLayer>(node); }

    const DenseLayer& dense() const { return std::get<DenseLayer>(node); }
    const ResidualAddLayer& add() const { return std::get<ResidualAddLayer>(node); }
    const MaxPoolLayer& maxpool() const { return std::get<MaxPoolLayer>(node); }
    const AttentionLayer& attention() const { return std::get<AttentionLayer>(node); }
};

struct NetSpec {
    int input_dim = 0;
    int output_neuron = 0;
    std::vector<LayerSpec> layers;

    int node_count() const { return static_cast<int>(layers.size()) + 1; }
    int out_node() const { return static_cast<int>(layers.size()); }

    // Output width of node n (0 = input).
    int width(int n) const;

    // Producers read by node n (n >= 1).
    std::vector<int> inputs_of(int n) const;

    bool has_attention() const;
    bool all_dense_relu() const;
    bool bias_free() const;

    // Structural invariants; throws SchemaError naming the offending layer.
    void validate() const;
};

struct AttnTrace {
    Matrix x;       // S x D input as consumed by the block
    Matrix a;       // softmax rows
    Matrix v;       // S x d_h
    Matrix logits;  // pre-softmax scores
};

struct ForwardTrace {
    std::vector<Vec> node_out;             // per node, node 0 = x
    std::vector<Vec> pre_act;              // per node; filled for dense nodes only
    std::vector<std::vector<int>> winner;  // per node; filled for max-pool nodes
    std::optional<AttnTrace> attn;
    int attn_node = -1;
    double output = 0.0;
};

ForwardTrace forward(const NetSpec& net, const Vec& x);

double activation_value(const ActivationKind& act, double z);

// JSON schema per the file format: strict validation, errors carry the JSON
// pointer of the offending field.
NetSpec net_from_json(const nlohmann::json& j);
nlohmann::json net_to_json(const NetSpec& net);
NetSpec load_net(const std::string& path);
void save_net(const NetSpec& net, const std::string& path);

struct GenNetOptions {
    std::vector<int> widths;  // includes the input width
    ActivationKind act;
    bool with_skip = false;
    bool with_maxpool = false;
    bool with_attention = false;
    int attn_tokens = 3;
    int attn_dh = 2;
};

// Deterministic He-initialised fixture generator shared by tests and the CLI.
NetSpec gen_net(const GenNetOptions& opt, std::uint64_t seed);

}  // namespace attrgame
