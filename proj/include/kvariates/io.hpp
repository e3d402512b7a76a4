#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kvariates/distributed.hpp"
#include "kvariates/geometry.hpp"
#include "kvariates/privacy.hpp"

namespace kvariates {

using Json = nlohmann::ordered_json;

// Comma-separated rows of reals. A first row that does not parse as numbers
// is treated as a header. Blank lines are ignored.
Dataset parse_csv(std::istream& in);
Dataset load_dataset(const std::string& path);

// Shortest round-trip decimal formatting.
void write_csv(std::ostream& out, const Dataset& data);
void save_dataset(const std::string& path, const Dataset& data);

struct DatasetManifest {
    std::string path;
    std::size_t d = 0;
    std::size_t m = 0;
    std::string name;
};

Json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const Json& j);
std::vector<DatasetManifest> load_manifest(const std::string& path);

// Published shapes of the real benchmark datasets.
struct KnownShape {
    const char* name;
    std::size_t m;
    std::size_t d;
};
const std::vector<KnownShape>& known_shapes();
std::optional<KnownShape> known_shape(const std::string& name);
// Throws InvalidArgument if `data` does not have the published shape.
void check_known_shape(const std::string& name, const Dataset& data);

Json to_json(const CenterSet& centers);
Json to_json(const SpreadReport& report);
Json to_json(const MessageLog& ledger);

void write_text(const std::string& path, const std::string& text);

}  // namespace kvariates
