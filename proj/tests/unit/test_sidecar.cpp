#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixture_server.hpp"
#include "threatcrawl/mock_backend.hpp"
#include "threatcrawl/sidecar_backend.hpp"

using namespace threatcrawl;
using threatcrawl::testing::FixtureResponse;
using threatcrawl::testing::FixtureServer;
using threatcrawl::testing::RecordedRequest;
using nlohmann::json;

namespace {

constexpr std::size_t kDim = 3072;

std::size_t word_count(const std::string& s) {
    std::istringstream in(s);
    std::string w;
    std::size_t n = 0;
    while (in >> w) ++n;
    return n;
}

// Stand-in for the embedding service: deterministic vectors derived from the
// mock backend, truncation when a sentence has more than 512 words.
struct FakeSidecar {
    FixtureServer server;
    std::atomic<bool> loading{false};
    std::atomic<int> embed_calls{0};
    std::string model = "bert-base-uncased";
    MockBackend vectors{3, kDim};

    FakeSidecar() {
        server.set_handler("/health", [this](const RecordedRequest&) {
            if (loading) return FixtureResponse{503, "application/json", R"({"status":"loading"})"};
            json body = {{"status", "ok"}, {"model_id", model}, {"D", kDim}};
            return FixtureResponse{200, "application/json", body.dump()};
        });
        server.set_handler("/embed", [this](const RecordedRequest& req) {
            ++embed_calls;
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("sentences")) {
                return FixtureResponse{400, "application/json", R"({"error":"malformed"})"};
            }
            if (body.value("model_id", model) != model) {
                return FixtureResponse{404, "application/json", R"({"error":"unknown model"})"};
            }
            json out = {{"vectors", json::array()}, {"truncated_flags", json::array()}};
            for (const auto& s : body["sentences"]) {
                auto text = s.get<std::string>();
                out["vectors"].push_back(vectors.embed_sentence(text).values);
                out["truncated_flags"].push_back(word_count(text) > 512);
            }
            return FixtureResponse{200, "application/json", out.dump()};
        });
    }

    SidecarOptions options(std::size_t batch = 64) const {
        SidecarOptions o;
        o.endpoint = server.origin();
        o.model_id = model;
        o.timeout_s = 10;
        o.batch_size = batch;
        return o;
    }
};

}  // namespace

TEST(Sidecar, ConnectReadsDimensionFromHealth) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options());
    EXPECT_EQ(backend->dimension(), kDim);
    EXPECT_EQ(backend->name(), "sidecar:bert-base-uncased");
    auto h = backend->health();
    EXPECT_TRUE(h.ready());
    EXPECT_EQ(h.model_id, "bert-base-uncased");
}

TEST(Sidecar, LoadingServiceRefused) {
    FakeSidecar fake;
    fake.loading = true;
    EXPECT_THROW(SidecarBackend::connect(fake.options()), BackendError);
}

TEST(Sidecar, ModelMismatchRefused) {
    FakeSidecar fake;
    auto o = fake.options();
    o.model_id = "other-model";
    EXPECT_THROW(SidecarBackend::connect(o), BackendError);
}

TEST(Sidecar, UnreachableServiceRefused) {
    int port;
    {
        FixtureServer s;
        port = s.port();
    }
    SidecarOptions o;
    o.endpoint = "http://127.0.0.1:" + std::to_string(port);
    o.timeout_s = 2;
    EXPECT_THROW(SidecarBackend::connect(o), BackendError);
}

TEST(Sidecar, BatchesReturnFullWidthVectorsInOrder) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options(4));
    std::vector<std::string> sentences;
    for (int i = 0; i < 10; ++i) sentences.push_back("sentence number " + std::to_string(i));
    auto out = backend->embed_batch(sentences);
    ASSERT_EQ(out.size(), 10u);
    for (std::size_t i = 0; i < out.size(); ++i) {
        ASSERT_EQ(out[i].dim(), kDim);
        EXPECT_EQ(out[i].values, fake.vectors.embed_sentence(sentences[i]).values);
    }
    EXPECT_EQ(fake.embed_calls.load(), 3);
}

TEST(Sidecar, IdenticalRequestsAgree) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options());
    auto a = backend->embed_sentence("Same sentence twice.");
    auto b = backend->embed_sentence("Same sentence twice.");
    ASSERT_EQ(a.dim(), b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-5);
}

TEST(Sidecar, TruncationFlagsExposed) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options());
    std::string long_sentence;
    for (int i = 0; i < 600; ++i) long_sentence += "tok ";
    std::vector<std::string> s = {"short one here", long_sentence};
    backend->embed_batch(s);
    EXPECT_EQ(backend->last_truncated(), (std::vector<bool>{false, true}));
}

TEST(Sidecar, EmptySentenceRejectedLocally) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options());
    std::vector<std::string> s = {"fine", ""};
    EXPECT_THROW(backend->embed_batch(s), BackendError);
    EXPECT_EQ(fake.embed_calls.load(), 0);
}

TEST(Sidecar, BadResponsesBecomeBackendErrors) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options());
    fake.server.set("/embed", FixtureResponse{500, "application/json", R"({"error":"boom"})"});
    EXPECT_THROW(backend->embed_sentence("x y z"), BackendError);
    fake.server.set("/embed", FixtureResponse{200, "application/json", R"({"vectors":[[1,2,3]]})"});
    EXPECT_THROW(backend->embed_sentence("x y z"), BackendError);
    fake.server.set("/embed", FixtureResponse{200, "application/json", R"({"vectors":[]})"});
    EXPECT_THROW(backend->embed_sentence("x y z"), BackendError);
    fake.server.set("/embed", FixtureResponse{200, "application/json", "not json"});
    EXPECT_THROW(backend->embed_sentence("x y z"), BackendError);
    json bad = {{"vectors", json::array({json::array()})}};
    for (std::size_t i = 0; i < kDim; ++i) bad["vectors"][0].push_back(i == 5 ? json("nan") : json(0.5));
    fake.server.set("/embed", FixtureResponse{200, "application/json", bad.dump()});
    EXPECT_THROW(backend->embed_sentence("x y z"), BackendError);
}

TEST(Sidecar, RequestBodyFollowsWireContract) {
    FakeSidecar fake;
    auto backend = SidecarBackend::connect(fake.options());
    backend->embed_sentence("Ransomware hit the hospital.");
    for (const auto& req : fake.server.requests()) {
        if (req.target != "/embed") continue;
        EXPECT_EQ(req.method, "POST");
        auto body = json::parse(req.body);
        EXPECT_EQ(body["model_id"], "bert-base-uncased");
        EXPECT_EQ(body["sentences"], json::array({"Ransomware hit the hospital."}));
    }
}
