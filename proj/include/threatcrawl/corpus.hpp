#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/classifier.hpp"

namespace threatcrawl {

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Directory names accepted for labels: the canonical names, case-insensitive,
// with '_' and '-' ignored ("malware_used", "not-relevant").
std::optional<Label> parse_label_dir(std::string_view name);

struct CorpusEntry {
    LabeledDocument doc;
    std::filesystem::path file;
    std::optional<std::string> source_url;
};

// Layout:
//   <dir>/<label>/<name>.txt|.html|.htm
//   <dir>/manifest.tsv   optional, "<label>/<name>\t<url>" per line
// HTML files go through main-content extraction. Files are read in sorted
// path order. Unknown label directories raise CorpusError naming them all.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir, std::size_t min_sentence_tokens = 3);

std::vector<LabeledDocument> corpus_documents(const std::vector<CorpusEntry>& entries);

}  // namespace threatcrawl
