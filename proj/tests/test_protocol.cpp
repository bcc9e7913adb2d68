#include <doctest.h>

#include "anguilla/protocol.hpp"

using namespace anguilla;
using nlohmann::json;

TEST_CASE("command messages round-trip") {
  GaitParams g;
  g.offset_phi = deg_to_rad(20);
  const std::vector<CommandMessage> msgs{
      {1, SetGait{g}},
      {2, SetCompliance{{0.0, 0.5, 1.0}, 0.25}},
      {3, SetCompliance{{1.0}, std::nullopt}},
      {4, SetFills{{1, 0.5, 0.5, 0}}},
      {5, SetFillRamp{{1, 1, 1, 1}, 20.0}},
      {6, Pause{}},
      {std::nullopt, Resume{}},
      {8, Reset{}},
  };
  for (const auto& m : msgs) {
    const json j = to_json(m);
    CAPTURE(j.dump());
    const auto back = parse_command(j.dump());
    CHECK(back.seq == m.seq);
    CHECK(to_json(back) == j);
    CHECK(back.command.index() == m.command.index());
  }
}

TEST_CASE("SetGait in degrees merges into the current gait") {
  GaitParams cur;
  cur.amplitude_A = deg_to_rad(50);
  const auto m = parse_command(
      std::string(R"({"type":"SetGait","seq":3,"gait":{"offset_phi_deg":20}})"), cur);
  const auto& g = std::get<SetGait>(m.command).gait;
  CHECK(g.offset_phi == doctest::Approx(0.349066).epsilon(1e-5));
  CHECK(g.amplitude_A == cur.amplitude_A);
  for (double deg : {0.0, 20.0, -20.0, 30.0, -30.0, 50.0, -50.0}) {
    const json j{{"type", "SetGait"}, {"gait", {{"amplitude_A_deg", deg}}}};
    CHECK(std::get<SetGait>(parse_command(j).command).gait.amplitude_A == deg * kPi / 180.0);
  }
}

TEST_CASE("reset carries a full scenario") {
  const auto m = parse_command(
      std::string(R"({"type":"Reset","config":{"name":"x","duration":3}})"));
  const auto& r = std::get<Reset>(m.command);
  REQUIRE(r.config);
  CHECK(r.config->name == "x");
  CHECK(r.config->duration == 3.0);
  CHECK_THROWS_AS(parse_command(std::string(R"({"type":"Reset","config":{"duration":-3}})")),
                  ValidationError);
}

TEST_CASE("malformed messages") {
  auto code_of = [](const std::string& line) {
    try {
      parse_command(line);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code_of("{oops") == ErrorCode::kParse);
  CHECK(code_of("[1,2]") == ErrorCode::kProtocol);
  CHECK(code_of(R"({"seq":1})") == ErrorCode::kProtocol);
  CHECK(code_of(R"({"type":"Launch"})") == ErrorCode::kProtocol);
  CHECK(code_of(R"({"type":"Pause","seq":1.5})") == ErrorCode::kProtocol);
  CHECK(code_of(R"({"type":"Pause","extra":1})") == ErrorCode::kValidation);
  CHECK(code_of(R"({"type":"SetFills"})") == ErrorCode::kValidation);
  CHECK(code_of(R"({"type":"SetFillRamp","target":[1,"a"],"seconds":2})") ==
        ErrorCode::kValidation);
}

TEST_CASE("replies") {
  const auto ack = make_ack(7, "Pause", 120);
  CHECK(ack["type"] == "ack");
  CHECK(ack["seq"] == 7);
  CHECK(ack["step"] == 120);
  CHECK(ack["command"] == "Pause");
  CHECK(make_ack(std::nullopt, "Pause", 0)["seq"].is_null());

  const auto err = make_error(4, ValidationError(std::vector<FieldError>{{"fills", "bad"}}));
  CHECK(err["type"] == "error");
  CHECK(err["code"] == "validation");
  CHECK(err["fields"][0]["field"] == "fills");
  CHECK(make_error(1, Error(ErrorCode::kProtocol, "x"))["code"] == "protocol");

  CHECK(peek_seq(R"({"seq": 9, "type": 4})") == 9);
  CHECK_FALSE(peek_seq("garbage"));
}
