#include <doctest.h>

#include <fstream>

#include "cardiosync/errors.hpp"
#include "cardiosync/ingest.hpp"
#include "cardiosync/synth.hpp"
#include "helpers.hpp"

using namespace cardiosync;
using testutil::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("load_waveform_csv parses a two-column file") {
  TempDir tmp("csv2");
  const auto p = tmp.path() / "w.csv";
  write_file(p, "t_seconds,value\n0,0\n0.05,1\n0.10,0\n");
  const Waveform w = load_waveform_csv(p, SignalLabel::Bvp);
  CHECK(w.rate_hz == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(w.start_s == 0.0);
  REQUIRE(w.size() == 3);
  CHECK(w.samples == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("load_waveform_csv rejects jittery time stamps") {
  TempDir tmp("jit");
  const auto p = tmp.path() / "w.csv";
  write_file(p, "t_seconds,value\n0,0\n0.05,1\n0.10,2\n0.30,3\n");
  CHECK(kind_of([&] { load_waveform_csv(p, SignalLabel::Bvp); }) ==
        ErrorKind::NonUniform);
}

TEST_CASE("load_waveform_csv accepts a value-only file with a sidecar rate") {
  TempDir tmp("sidecar");
  const auto p = tmp.path() / "w.csv";
  write_file(p, "value\n0\n1\n2\n3\n");
  write_file(tmp.path() / "w.csv.rate", "50\n");
  const Waveform w = load_waveform_csv(p, SignalLabel::Resp);
  CHECK(w.rate_hz == 50.0);
  CHECK(w.start_s == 0.0);
  CHECK(w.size() == 4);

  // An explicit rate argument wins over the sidecar.
  const Waveform w2 = load_waveform_csv(p, SignalLabel::Resp, 25.0);
  CHECK(w2.rate_hz == 25.0);

  std::filesystem::remove(tmp.path() / "w.csv.rate");
  CHECK(kind_of([&] { load_waveform_csv(p, SignalLabel::Resp); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("load_waveform_csv reports malformed rows with line numbers") {
  TempDir tmp("bad");
  const auto p = tmp.path() / "w.csv";
  write_file(p, "t_seconds,value\n0,0\n0.05,oops\n0.10,2\n");
  try {
    load_waveform_csv(p, SignalLabel::Bvp);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("load_waveform_csv rejects NaN and infinities") {
  TempDir tmp("nan");
  const auto p = tmp.path() / "w.csv";
  write_file(p, "t_seconds,value\n0,0\n0.05,nan\n0.10,2\n");
  CHECK(kind_of([&] { load_waveform_csv(p, SignalLabel::Bvp); }) ==
        ErrorKind::ParseError);
  write_file(p, "t_seconds,value\n0,0\n0.05,inf\n0.10,2\n");
  CHECK(kind_of([&] { load_waveform_csv(p, SignalLabel::Bvp); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("load_waveform_csv checks the expected rate") {
  TempDir tmp("rate");
  const auto p = tmp.path() / "w.csv";
  write_file(p, "t_seconds,value\n0,0\n0.05,1\n0.10,2\n0.15,3\n");
  CHECK(kind_of([&] { load_waveform_csv(p, SignalLabel::Bvp, 25.0); }) ==
        ErrorKind::RateMismatch);
  CHECK_NOTHROW(load_waveform_csv(p, SignalLabel::Bvp, 20.0));
}

TEST_CASE("waveform CSV round-trip is bit exact") {
  SynthConfig cfg;
  cfg.duration_s = 90.0;
  cfg.rsa_gain = 0.2;
  cfg.epsilon = 0.4;
  cfg.phase_noise = 0.2;
  cfg.seed = 77;
  const SynthSession s = generate(cfg);

  TempDir tmp("roundtrip");
  for (const Waveform* w : {&s.resp, &s.pulse}) {
    const auto p = tmp.path() / "w.csv";
    write_waveform_csv(p, *w);
    const Waveform back = load_waveform_csv(p, w->label);
    CHECK(back.samples == w->samples);
    CHECK(back.rate_hz == w->rate_hz);
    CHECK(back.start_s == w->start_s);
  }
}

TEST_CASE("scan_cohort indexes valid manifests") {
  TempDir tmp("cohort");
  SynthConfig cfg;
  cfg.duration_s = 65.0;
  const SynthSession s = generate(cfg);
  write_waveform_csv(tmp.path() / "r1.csv", s.resp);
  write_waveform_csv(tmp.path() / "p1.csv", s.pulse);
  write_waveform_csv(tmp.path() / "r2.csv", s.resp);
  write_waveform_csv(tmp.path() / "p2.csv", s.pulse);

  write_file(tmp.path() / "manifest.csv",
             "subject,stage,repetition,resp,bvp,rppg\n"
             "s01,1,0,r1.csv,p1.csv,\n"
             "s01,2,0,r2.csv,,p2.csv\n");
  const CohortIndex index =
      scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
  REQUIRE(index.sessions.size() == 2);
  CHECK(index.sessions[0].stage() == Stage::Stationary);
  CHECK(index.sessions[1].stage() == Stage::ExerciseRecovery);
  CHECK(index.sessions[1].bvp_path.empty());

  const Session loaded = load_session(index.sessions[0]);
  CHECK(loaded.subject_id == "s01");
  CHECK(loaded.bvp.has_value());
  CHECK_FALSE(loaded.rppg.has_value());
  CHECK(loaded.duration_s >= 60.0);
}

TEST_CASE("scan_cohort reports missing files by name") {
  TempDir tmp("missing");
  write_file(tmp.path() / "manifest.csv",
             "subject,stage,repetition,resp,bvp,rppg\n"
             "s01,1,0,gone.csv,alsogone.csv,\n");
  try {
    scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingFile);
    CHECK(std::string(e.what()).find("gone.csv") != std::string::npos);
  }
}

TEST_CASE("scan_cohort rejects duplicates and bad entries") {
  TempDir tmp("dupe");
  SynthConfig cfg;
  cfg.duration_s = 65.0;
  const SynthSession s = generate(cfg);
  write_waveform_csv(tmp.path() / "r.csv", s.resp);
  write_waveform_csv(tmp.path() / "p.csv", s.pulse);

  write_file(tmp.path() / "manifest.csv",
             "subject,stage,repetition,resp,bvp,rppg\n"
             "s01,1,0,r.csv,p.csv,\n"
             "s01,1,0,r.csv,p.csv,\n");
  CHECK(kind_of([&] {
          scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
        }) == ErrorKind::ManifestError);

  write_file(tmp.path() / "manifest.csv",
             "subject,stage,repetition,resp,bvp,rppg\n"
             "s01,9,0,r.csv,p.csv,\n");
  CHECK(kind_of([&] {
          scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
        }) == ErrorKind::ManifestError);

  write_file(tmp.path() / "manifest.csv",
             "subject,stage,repetition,resp,bvp,rppg\n"
             "s01,1,0,r.csv,,\n");
  CHECK(kind_of([&] {
          scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
        }) == ErrorKind::ManifestError);

  write_file(tmp.path() / "manifest.csv", "subject,stage\ns01,1\n");
  CHECK(kind_of([&] {
          scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
        }) == ErrorKind::ManifestError);
}

TEST_CASE("write_manifest and scan_cohort round-trip") {
  TempDir tmp("mrt");
  SynthConfig cfg;
  cfg.duration_s = 65.0;
  const SynthSession s = generate(cfg);
  write_waveform_csv(tmp.path() / "r.csv", s.resp);
  write_waveform_csv(tmp.path() / "p.csv", s.pulse);

  SessionRecord rec;
  rec.subject_id = "s05";
  rec.stage_number = 3;
  rec.repetition = 2;
  rec.resp_path = "r.csv";
  rec.bvp_path = "p.csv";
  write_manifest(tmp.path() / "manifest.csv", {rec});

  const CohortIndex index =
      scan_cohort(tmp.path(), tmp.path() / "manifest.csv");
  REQUIRE(index.sessions.size() == 1);
  CHECK(index.sessions[0].subject_id == "s05");
  CHECK(index.sessions[0].stage_number == 3);
  CHECK(index.sessions[0].repetition == 2);
}

TEST_CASE("load_session enforces the overlap invariant") {
  TempDir tmp("short");
  SynthConfig cfg;
  cfg.duration_s = 30.0;  // below the 60 s minimum
  const SynthSession s = generate(cfg);
  write_waveform_csv(tmp.path() / "r.csv", s.resp);
  write_waveform_csv(tmp.path() / "p.csv", s.pulse);

  SessionRecord rec;
  rec.subject_id = "s01";
  rec.stage_number = 1;
  rec.resp_path = tmp.path() / "r.csv";
  rec.bvp_path = tmp.path() / "p.csv";
  CHECK(kind_of([&] { load_session(rec); }) == ErrorKind::InvalidInput);
}

TEST_CASE("stage mapping follows the protocol") {
  CHECK(stage_from_number(1) == Stage::Stationary);
  CHECK(stage_from_number(3) == Stage::Stationary);
  CHECK(stage_from_number(2) == Stage::ExerciseRecovery);
  CHECK(stage_from_number(4) == Stage::ExerciseRecovery);
  CHECK_THROWS_AS(stage_from_number(0), Error);
}
