#pragma once

#include "mbda/gabor.hpp"
#include "mbda/geometric.hpp"

#include <set>
#include <string>
#include <vector>

namespace mbda {

struct ManifestEntry {
    std::string id;
    int subject = 0;
    std::string split;  // "train" or "test"
    std::vector<int> labels;
};

struct Manifest {
    int format = 1;
    Index image_rows = 0;
    Index image_cols = 0;
    int frame_count = 0;
    std::vector<int> au_vocabulary;
    std::vector<ManifestEntry> entries;
};

/// One labeled image sequence with its landmark track.
struct SequenceSample {
    std::string id;
    int subject = 0;
    std::string split;
    std::set<int> labels;
    ImageSequence frames;
    LandmarkTrack track;
};

void save_manifest(const std::string& path, const Manifest& manifest);
Manifest load_manifest(const std::string& path);

/// Throws unless train and test subject sets are disjoint and both splits
/// are nonempty.
void check_split(const Manifest& manifest);

std::string sequence_dir(const std::string& root, const std::string& id);
std::string frame_path(const std::string& root, const std::string& id, int frame);  // 1-based

/// Loads a sequence's frames and track from root/<id>/.
SequenceSample load_sample(const std::string& root, const ManifestEntry& entry, int frame_count);

}  // namespace mbda
