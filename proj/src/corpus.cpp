#include "threatcrawl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "threatcrawl/html.hpp"
#include "threatcrawl/log.hpp"
#include "threatcrawl/sentences.hpp"

namespace threatcrawl {

namespace fs = std::filesystem;

namespace {

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '-') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw CorpusError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::optional<Label> parse_label_dir(std::string_view name) {
    auto key = squash(name);
    for (Label l : {Label::TTPs, Label::BroadInformation, Label::MalwareUsed, Label::VulnerabilityTargeted,
                    Label::Relevant, Label::NotRelevant}) {
        if (squash(label_name(l)) == key) return l;
    }
    return std::nullopt;
}

std::vector<CorpusEntry> load_corpus(const fs::path& dir, std::size_t min_sentence_tokens) {
    if (!fs::is_directory(dir)) throw CorpusError("corpus directory not found: " + dir.string());

    std::map<std::string, std::string> manifest;
    if (fs::exists(dir / "manifest.tsv")) {
        std::istringstream in(read_file(dir / "manifest.tsv"));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos) continue;
            manifest[line.substr(0, tab)] = line.substr(tab + 1);
        }
    }

    std::vector<fs::path> label_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) label_dirs.push_back(entry.path());
    }
    std::sort(label_dirs.begin(), label_dirs.end());

    std::vector<std::string> unknown;
    for (const auto& d : label_dirs) {
        if (!parse_label_dir(d.filename().string())) unknown.push_back(d.filename().string());
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
        throw CorpusError("unknown label directories: " + list);
    }

    std::vector<CorpusEntry> out;
    for (const auto& d : label_dirs) {
        Label label = *parse_label_dir(d.filename().string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(d)) {
            if (!entry.is_regular_file()) continue;
            auto ext = entry.path().extension().string();
            if (ext == ".txt" || ext == ".html" || ext == ".htm") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::string content = read_file(f);
            std::string ext = f.extension().string();
            std::string text = ext == ".txt" ? content : extract_main_content(content);
            CorpusEntry e;
            e.file = f;
            e.doc.id = d.filename().string() + "/" + f.filename().string();
            e.doc.label = label;
            e.doc.sentences = split_sentences(text, min_sentence_tokens);
            if (auto it = manifest.find(e.doc.id); it != manifest.end()) e.source_url = it->second;
            if (e.doc.sentences.empty()) log_warn("corpus document without sentences: " + e.doc.id);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<LabeledDocument> corpus_documents(const std::vector<CorpusEntry>& entries) {
    std::vector<LabeledDocument> docs;
    docs.reserve(entries.size());
    for (const auto& e : entries) docs.push_back(e.doc);
    return docs;
}

}  // namespace threatcrawl
