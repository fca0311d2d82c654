#include "mbda/dataset.hpp"

#include "mbda/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace mbda {

using nlohmann::json;

void save_manifest(const std::string& path, const Manifest& manifest) {
    json doc;
    doc["format"] = manifest.format;
    doc["image_rows"] = manifest.image_rows;
    doc["image_cols"] = manifest.image_cols;
    doc["frame_count"] = manifest.frame_count;
    doc["au_vocabulary"] = manifest.au_vocabulary;
    json seqs = json::array();
    for (const ManifestEntry& entry : manifest.entries) {
        json e;
        e["id"] = entry.id;
        e["subject"] = entry.subject;
        e["split"] = entry.split;
        e["labels"] = entry.labels;
        seqs.push_back(e);
    }
    doc["sequences"] = seqs;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_manifest: cannot open " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_manifest: write failed for " + path);
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_manifest: cannot open " + path);
    json doc;
    in >> doc;
    Manifest manifest;
    manifest.format = doc.at("format").get<int>();
    if (manifest.format != 1)
        throw std::runtime_error("load_manifest: unsupported format version in " + path);
    manifest.image_rows = doc.at("image_rows").get<Index>();
    manifest.image_cols = doc.at("image_cols").get<Index>();
    manifest.frame_count = doc.at("frame_count").get<int>();
    manifest.au_vocabulary = doc.at("au_vocabulary").get<std::vector<int>>();
    for (const json& e : doc.at("sequences")) {
        ManifestEntry entry;
        entry.id = e.at("id").get<std::string>();
        entry.subject = e.at("subject").get<int>();
        entry.split = e.at("split").get<std::string>();
        entry.labels = e.at("labels").get<std::vector<int>>();
        if (entry.split != "train" && entry.split != "test")
            throw std::runtime_error("load_manifest: bad split '" + entry.split + "' in " + path);
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void check_split(const Manifest& manifest) {
    std::set<int> train, test;
    for (const ManifestEntry& entry : manifest.entries)
        (entry.split == "train" ? train : test).insert(entry.subject);
    if (train.empty() || test.empty())
        throw std::runtime_error("dataset split: both train and test sequences are required");
    for (int subject : test)
        if (train.count(subject))
            throw std::runtime_error("dataset split: subject " + std::to_string(subject) +
                                     " appears in both train and test");
}

std::string sequence_dir(const std::string& root, const std::string& id) {
    return root + "/" + id;
}

std::string frame_path(const std::string& root, const std::string& id, int frame) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03d.pgm", frame);
    return sequence_dir(root, id) + "/" + name;
}

SequenceSample load_sample(const std::string& root, const ManifestEntry& entry, int frame_count) {
    SequenceSample sample;
    sample.id = entry.id;
    sample.subject = entry.subject;
    sample.split = entry.split;
    sample.labels.insert(entry.labels.begin(), entry.labels.end());
    sample.frames.frames.reserve(static_cast<std::size_t>(frame_count));
    for (int f = 1; f <= frame_count; ++f)
        sample.frames.frames.push_back(load_pgm(frame_path(root, entry.id, f)));
    sample.track = load_track(sequence_dir(root, entry.id) + "/track.csv");
    return sample;
}

}  // namespace mbda
