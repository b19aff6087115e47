#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pnas/csv.hpp"
#include "pnas/errors.hpp"
#include "pnas/rng.hpp"
#include "pnas/sha256.hpp"
#include "pnas/subprocess.hpp"

using namespace pnas;

TEST_CASE("sha256 standard vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 padding boundaries") {
  CHECK(sha256_hex(std::string(55, 'a')) ==
        "9f4390f8d30c2dd92ec9f095b65e2b9ae9b0a925a5258e241c9f1e910f734318");
  CHECK(sha256_hex(std::string(56, 'a')) ==
        "b35439a4ac6f0948b6d6f9e3c6af0f5f590ce20f1bde7090ef7970686ec6738a");
  CHECK(sha256_hex(std::string(64, 'a')) ==
        "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
  CHECK(sha256_hex(std::string(65, 'a')) ==
        "635361c48bb9eab14198e76ea8ab7f1a41685d6ad62aa9146d301d4f17eb0ae0");
}

TEST_CASE("sha256 long input and full byte range") {
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
  std::string all;
  for (int i = 0; i < 256; ++i) all.push_back(static_cast<char>(i));
  CHECK(sha256_hex(all) ==
        "40aff2e9d2d8922e47afd4648e6967497158785fbd1da870e7110266bf944880");
}

TEST_CASE("csv escaping rules") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("") == "");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_escape("cr\rhere") == "\"cr\rhere\"");
}

TEST_CASE("csv rows end with CRLF") {
  std::ostringstream os;
  write_csv_row(os, {"a", "b,c", "d"});
  CHECK(os.str() == "a,\"b,c\",d\r\n");
}

TEST_CASE("csv round trip with awkward fields") {
  std::ostringstream os;
  write_csv_row(os, {"id", "text", "num"});
  write_csv_row(os, {"1", "comma, quote \" and\nnewline", "2.5"});
  write_csv_row(os, {"2", "", "3"});
  std::istringstream is(os.str());
  CsvTable t = read_csv(is);
  REQUIRE(t.header == std::vector<std::string>{"id", "text", "num"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "comma, quote \" and\nnewline");
  CHECK(t.rows[1][1] == "");
  CHECK(t.column("num") == 2);
  CHECK_THROWS_AS(t.column("missing"), ParseError);
}

TEST_CASE("csv accepts bare LF line endings") {
  std::istringstream is("x,y\n1,2\n3,4\n");
  CsvTable t = read_csv(is);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
}

TEST_CASE("csv rejects malformed input") {
  std::istringstream unterminated("a,b\n\"open,2\n");
  CHECK_THROWS_AS(read_csv(unterminated), ParseError);
  std::istringstream ragged("a,b\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(ragged), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), ParseError);
}

TEST_CASE("format_double is shortest round-trip form") {
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1114688.0) == "1114688");
  CHECK(format_double(0.0) == "0");
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform_int(-12, 12));
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("rng determinism and ranges") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(7);
  for (int i = 0; i < 10000; ++i) {
    double u = c.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    std::size_t idx = c.index(17);
    CHECK(idx < 17);
    std::int64_t v = c.uniform_int(-3, 5);
    CHECK(v >= -3);
    CHECK(v <= 5);
  }
}

TEST_CASE("rng bernoulli endpoints") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("rng normal moments") {
  Rng rng(12345);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal(0.0, 1.0);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.015);
  CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("rng pick covers all entries") {
  Rng rng(5);
  std::vector<int> v{10, 20, 30};
  std::vector<int> seen(3, 0);
  for (int i = 0; i < 300; ++i) {
    int x = rng.pick(v);
    if (x == 10) ++seen[0];
    if (x == 20) ++seen[1];
    if (x == 30) ++seen[2];
  }
  CHECK(seen[0] > 50);
  CHECK(seen[1] > 50);
  CHECK(seen[2] > 50);
}

TEST_CASE("subprocess stdin to stdout round trip") {
  ProcessResult r = run_process({"/bin/cat"}, "hello\nworld\n", 5000);
  CHECK(r.exit_code == 0);
  CHECK_FALSE(r.timed_out);
  CHECK(r.out == "hello\nworld\n");
  CHECK(r.err.empty());
}

TEST_CASE("subprocess large payload round trip") {
  std::string big(1 << 20, 'x');
  ProcessResult r = run_process({"/bin/cat"}, big, 10000);
  CHECK(r.exit_code == 0);
  CHECK(r.out.size() == big.size());
  CHECK(r.out == big);
}

TEST_CASE("subprocess captures exit code and stderr") {
  ProcessResult fail = run_process({"/bin/false"}, "", 5000);
  CHECK(fail.exit_code == 1);
  ProcessResult ls = run_process({"/bin/ls", "/definitely/not/a/path"}, "", 5000);
  CHECK(ls.exit_code != 0);
  CHECK_FALSE(ls.err.empty());
}

TEST_CASE("subprocess missing binary reports exec failure") {
  ProcessResult r = run_process({"/no/such/binary"}, "", 5000);
  CHECK(r.exit_code == 127);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("subprocess timeout kills the child") {
  const auto t0 = std::chrono::steady_clock::now();
  ProcessResult r = run_process({"/bin/sleep", "5"}, "", 200);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  CHECK(r.timed_out);
  CHECK(elapsed < 2000);
}
