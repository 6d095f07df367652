#include <filesystem>
#include <thread>

#include <gtest/gtest.h>

#include "newsfmt/annotation_service.hpp"
#include "newsfmt/corpus.hpp"

using namespace newsfmt;
namespace fs = std::filesystem;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root = fs::temp_directory_path() / ("newsfmt_service_" + std::to_string(::getpid()));
    fs::remove_all(root);
    frames = generateSyntheticCorpus(2, 17);
    fs::create_directories(root / "frames");
    for (const auto& f : frames) writeImage(f.image, root / "frames" / (f.name + ".png"));
    service = std::make_unique<AnnotationService>(
        ServiceOptions{root / "frames", root / "truth", root / "dataset", {}}, PipelineConfig{});
    service->registerRoutes(server);
    port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  void TearDown() override {
    server.stop();
    thread.join();
    fs::remove_all(root);
  }

  static nlohmann::json body(const httplib::Result& r) { return nlohmann::json::parse(r->body); }

  fs::path root;
  std::vector<CorpusFrame> frames;
  std::unique_ptr<AnnotationService> service;
  httplib::Server server;
  int port = 0;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST_F(ServiceTest, ListsFrames) {
  const auto r = client->Get("/frames");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  const auto j = body(r);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["id"], "frame_0000");
  EXPECT_EQ(j[1]["file"], "frame_0001.png");
}

TEST_F(ServiceTest, ImageIsPixelExactPng) {
  const auto r = client->Get("/frames/frame_0001/image");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  const auto img = decodeImage(std::vector<unsigned char>(r->body.begin(), r->body.end()));
  EXPECT_TRUE(std::ranges::equal(img.pixels(), frames[1].image.pixels()));
}

TEST_F(ServiceTest, UnknownFrameIs404) {
  for (const char* path : {"/frames/nope/image", "/frames/nope/bands", "/frames/nope/annotations"}) {
    const auto r = client->Get(path);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404) << path;
    EXPECT_TRUE(body(r).contains("error"));
  }
  const auto r = client->Post("/frames/nope/annotations", R"({"bands": []})", "application/json");
  EXPECT_EQ(r->status, 404);
}

TEST_F(ServiceTest, BandsAreBottomLeftHoughCells) {
  const auto r = client->Get("/frames/frame_0000/bands");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  const auto j = body(r);
  EXPECT_EQ(j["width"], frames[0].image.width());
  const auto expected = labelingBands(frames[0].image, PipelineConfig{});
  ASSERT_EQ(j["bands"].size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_EQ(j["bands"][k]["index"], k);
    EXPECT_EQ(j["bands"][k]["x"], expected[k].x);
    EXPECT_EQ(j["bands"][k]["h"], expected[k].h);
  }
}

TEST_F(ServiceTest, AnnotationRoundTrip) {
  EXPECT_TRUE(body(client->Get("/frames/frame_0000/annotations"))["bands"].empty());
  const nlohmann::json req = {{"bands",
                               {{{"label", "text"}, {"x", 0}, {"y", 240}, {"w", 480}, {"h", 30}},
                                {{"label", "natural"}, {"x", 0}, {"y", 0}, {"w", 480}, {"h", 240}}}}};
  const auto post = client->Post("/frames/frame_0000/annotations", req.dump(), "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 200);
  const auto saved = readGroundTruth(root / "truth" / "frame_0000.txt");
  ASSERT_EQ(saved.size(), 2u);
  EXPECT_EQ(saved[0].label, BandLabel::natural);  // canonical (y, x) order
  EXPECT_EQ(saved[1], (Band{0, 240, 480, 30, BandLabel::text}));
  const auto got = body(client->Get("/frames/frame_0000/annotations"));
  EXPECT_EQ(got["bands"], body(post)["bands"]);
  EXPECT_EQ(got["bands"][1]["label"], "text");
}

TEST_F(ServiceTest, MalformedAnnotationsAre400) {
  const std::vector<std::string> bad{
      "not json",
      R"([1, 2])",
      R"({"bands": 3})",
      R"({"bands": [{"label": "text", "x": 0, "y": 0, "w": 10}]})",
      R"({"bands": [{"label": "logo", "x": 0, "y": 0, "w": 10, "h": 10}]})",
      R"({"bands": [{"label": "text", "x": 0, "y": 0, "w": 0, "h": 10}]})",
      R"({"bands": [{"label": "text", "x": 470, "y": 0, "w": 20, "h": 10}]})",
      R"({"bands": [{"label": "text", "x": 1.5, "y": 0, "w": 20, "h": 10}]})",
  };
  for (const auto& b : bad) {
    const auto r = client->Post("/frames/frame_0000/annotations", b, "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400) << b;
    EXPECT_TRUE(body(r).contains("error"));
  }
  EXPECT_FALSE(fs::exists(root / "truth" / "frame_0000.txt"));
}

TEST_F(ServiceTest, LabelingDumpsPixelExactCrop) {
  const auto bands = labelingBands(frames[1].image, PipelineConfig{});
  const auto r = client->Post("/frames/frame_0001/bands/0/label", R"({"label": "natural"})", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(body(r)["file"], "natural/frame_0001_band0.png");
  const auto cropImg = readImage(root / "dataset" / "natural" / "frame_0001_band0.png");
  const Band& b = bands[0];
  EXPECT_TRUE(std::ranges::equal(cropImg.pixels(), crop(frames[1].image, b.x, b.y, b.w, b.h).pixels()));
}

TEST_F(ServiceTest, RelabelKeepsOnlyLatestCrop) {
  client->Post("/frames/frame_0001/bands/1/label", R"({"label": "natural"})", "application/json");
  ASSERT_TRUE(fs::exists(root / "dataset" / "natural" / "frame_0001_band1.png"));
  const auto r = client->Post("/frames/frame_0001/bands/1/label", R"({"label": "artificial"})", "application/json");
  EXPECT_EQ(r->status, 200);
  EXPECT_FALSE(fs::exists(root / "dataset" / "natural" / "frame_0001_band1.png"));
  EXPECT_TRUE(fs::exists(root / "dataset" / "artificial" / "frame_0001_band1.png"));
}

TEST_F(ServiceTest, LabelErrors) {
  const auto outOfRange = client->Post("/frames/frame_0001/bands/999/label", R"({"label": "natural"})", "application/json");
  EXPECT_EQ(outOfRange->status, 409);
  EXPECT_EQ(client->Post("/frames/frame_0001/bands/0/label", R"({"label": "text"})", "application/json")->status, 400);
  EXPECT_EQ(client->Post("/frames/frame_0001/bands/0/label", "{}", "application/json")->status, 400);
  EXPECT_EQ(client->Post("/frames/zzz/bands/0/label", R"({"label": "natural"})", "application/json")->status, 404);
  EXPECT_FALSE(fs::exists(root / "dataset" / "natural" / "frame_0001_band0.png"));
}

TEST_F(ServiceTest, SourceFramesUntouched) {
  const auto before = fs::last_write_time(root / "frames" / "frame_0000.png");
  client->Post("/frames/frame_0000/bands/0/label", R"({"label": "natural"})", "application/json");
  client->Post("/frames/frame_0000/annotations", R"({"bands": []})", "application/json");
  EXPECT_EQ(fs::last_write_time(root / "frames" / "frame_0000.png"), before);
  EXPECT_EQ(listImages(root / "frames").size(), 2u);
}

TEST(Service, MissingFramesDirectory) {
  EXPECT_THROW(AnnotationService(ServiceOptions{"/nonexistent/frames", {}, {}, {}}, PipelineConfig{}), Error);
}

TEST_F(ServiceTest, LabelEveryBandNatural) {
  const auto n = body(client->Get("/frames/frame_0000/bands"))["bands"].size();
  ASSERT_GT(n, 0u);
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = client->Post("/frames/frame_0000/bands/" + std::to_string(k) + "/label", R"({"label": "natural"})",
                                "application/json");
    EXPECT_EQ(r->status, 200);
  }
  EXPECT_EQ(listImages(root / "dataset" / "natural").size(), n);
  EXPECT_FALSE(fs::exists(root / "dataset" / "artificial"));
}

TEST(Service, EmptyFramesDirectoryListsNothing) {
  const auto dir = fs::temp_directory_path() / ("newsfmt_service_empty_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  AnnotationService service(ServiceOptions{dir, {}, {}, {}}, PipelineConfig{});
  httplib::Server server;
  service.registerRoutes(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const auto r = client.Get("/frames");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "[]");
  server.stop();
  t.join();
  fs::remove_all(dir);
}
