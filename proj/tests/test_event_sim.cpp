#include "doctest.h"

#include <fstream>
#include <sstream>

#include "droidmark/event_sim.hpp"

using namespace droidmark;

namespace {

const SuspectList kAllCanonical(canonical_processes().begin(), canonical_processes().end());

std::string read_fixture(const std::string &name) {
    std::ifstream in(std::string(FIXTURES_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("empty trace replays to nothing") {
    CHECK(replay_trace("", kAllCanonical, 5000).empty());
    CHECK(replay_trace("# comment only\n\n", kAllCanonical, 5000).empty());
}

TEST_CASE("single event becomes a single instance with its bits OR-ed in") {
    auto out = replay_trace(
        "100,com.elite.SMSReceiver,SMSReceiver;android.telephony.SmsManager,1\n",
        kAllCanonical, 5000);
    REQUIRE(out.size() == 1);
    CHECK(out[0].process == "com.elite.SMSReceiver");
    CHECK(out[0].boot_receiver == 0);
    CHECK(out[0].sms_receiver == 1);
    CHECK(out[0].alarm_receiver == 0);
    CHECK(out[0].sms_manager == 1);
    CHECK(out[0].screen_wake == 1);
    CHECK(out[0].label == InstanceLabel::Unknown);
}

TEST_CASE("events for unwatched processes are dropped") {
    auto out = replay_trace("100,com.stranger.app,SMSReceiver,1\n", kAllCanonical, 5000);
    CHECK(out.empty());
}

TEST_CASE("bucketing groups by process and window; wake ties go to awake") {
    std::string trace =
        "0,com.elite.SMSReceiver,BootReceiver,0\n"
        "100,com.elite.SMSReceiver,SMSReceiver,1\n"
        "200,com.elite.BootReceiver,BootReceiver,0\n"
        "6000,com.elite.SMSReceiver,android.telephony.SmsManager,0\n";
    auto out = replay_trace(trace, kAllCanonical, 5000);
    REQUIRE(out.size() == 3);
    // deterministic order: by (window, process)
    CHECK(out[0].process == "com.elite.BootReceiver");
    CHECK(out[1].process == "com.elite.SMSReceiver");
    CHECK(out[1].boot_receiver == 1);
    CHECK(out[1].sms_receiver == 1);
    CHECK(out[1].screen_wake == 1); // 1 vs 1 votes, tie resolves awake
    CHECK(out[2].process == "com.elite.SMSReceiver");
    CHECK(out[2].sms_manager == 1);
    CHECK(out[2].screen_wake == 0);

    std::size_t pairs = 3; // (w0, Boot), (w0, SMS), (w1, SMS)
    CHECK(out.size() <= pairs);
}

TEST_CASE("trace errors") {
    CHECK_THROWS_AS(replay_trace("not,enough\n", kAllCanonical, 5000), MalformedTrace);
    CHECK_THROWS_AS(replay_trace("abc,com.samsung.ui,,1\n", kAllCanonical, 5000),
                    MalformedTrace);
    CHECK_THROWS_AS(replay_trace("100,com.samsung.ui,Nonsense,1\n", kAllCanonical, 5000),
                    MalformedTrace);
    CHECK_THROWS_AS(replay_trace("100,com.samsung.ui,,2\n", kAllCanonical, 5000),
                    MalformedTrace);
    CHECK_THROWS_AS(replay_trace("100,com.samsung.ui,,1\n50,com.samsung.ui,,1\n",
                                 kAllCanonical, 5000),
                    NonMonotonicTimestamps);
    CHECK_THROWS_AS(replay_trace("", kAllCanonical, 0), Error);
}

TEST_CASE("labeling rule: SMS send while asleep is malicious") {
    MonitorInstance inst;
    inst.process = "com.elite.SMSReceiver";

    inst.sms_manager = 1;
    inst.screen_wake = 1;
    CHECK(label_instance(inst) == InstanceLabel::Regular);

    inst.screen_wake = 0;
    CHECK(label_instance(inst) == InstanceLabel::Malicious);

    inst.sms_manager = 0;
    CHECK(label_instance(inst) == InstanceLabel::Regular);

    SUBCASE("only two attributes matter") {
        for (int sms = 0; sms <= 1; ++sms) {
            for (int wake = 0; wake <= 1; ++wake) {
                InstanceLabel want =
                    sms == 1 && wake == 0 ? InstanceLabel::Malicious : InstanceLabel::Regular;
                for (int boot = 0; boot <= 1; ++boot) {
                    for (int recv = 0; recv <= 1; ++recv) {
                        for (int alarm = 0; alarm <= 1; ++alarm) {
                            MonitorInstance x;
                            x.process = canonical_processes()[(boot + recv + alarm) % 8];
                            x.boot_receiver = boot;
                            x.sms_receiver = recv;
                            x.alarm_receiver = alarm;
                            x.sms_manager = sms;
                            x.screen_wake = wake;
                            CHECK(label_instance(x) == want);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("generate_dataset is balanced, labeled and deterministic") {
    Dataset ds = generate_dataset(1, 32);
    REQUIRE(ds.rows.size() == 32);
    REQUIRE(ds.attributes.size() == 7);
    CHECK(ds.attributes[0].values == canonical_processes());

    int malicious = 0;
    for (const auto &row : ds.rows) {
        REQUIRE(row[6] != kUnknownValue);
        if (row[6] == 1) ++malicious;
        // labels agree with the rule
        InstanceLabel want = row[4] == 1 && row[5] == 0 ? InstanceLabel::Malicious
                                                        : InstanceLabel::Regular;
        CHECK(row[6] == (want == InstanceLabel::Malicious ? 1 : 0));
    }
    CHECK(malicious == 16);

    CHECK(generate_dataset(1, 32) == ds);
    CHECK(generate_dataset(2, 32) != ds);

    SUBCASE("n = 2 gives one instance per class") {
        Dataset tiny = generate_dataset(9, 2);
        REQUIRE(tiny.rows.size() == 2);
        CHECK(tiny.rows[0][6] + tiny.rows[1][6] == 1);
    }
    SUBCASE("class balance stays within 40-60 percent") {
        for (std::uint64_t seed : {1, 7, 99}) {
            for (int n : {10, 31, 32, 64}) {
                Dataset d = generate_dataset(seed, n);
                int mal = 0;
                for (const auto &row : d.rows) mal += row[6];
                double share = static_cast<double>(mal) / n;
                CHECK(share >= 0.4);
                CHECK(share <= 0.6);
            }
        }
    }
    SUBCASE("n below 2 is rejected") {
        CHECK_THROWS_AS(generate_dataset(1, 1), Error);
    }
}

TEST_CASE("instances round trip through the dataset form") {
    auto instances = replay_trace(read_fixture("elite_trace.csv"), kAllCanonical, 5000);
    REQUIRE(instances.size() == 32);
    for (auto &inst : instances) inst.label = label_instance(inst);
    Dataset ds = instances_to_dataset(instances);
    CHECK(ds.attributes[0].values == canonical_processes());
    CHECK(instances_from_dataset(ds) == instances);

    int malicious = 0;
    for (const auto &row : ds.rows) malicious += row[6];
    CHECK(malicious == 16);
}

TEST_CASE("non-canonical processes fall back to the observed domain") {
    std::vector<MonitorInstance> instances(2);
    instances[0].process = "com.other.app";
    instances[1].process = "com.samsung.ui";
    Dataset ds = instances_to_dataset(instances);
    CHECK(ds.attributes[0].values == std::vector<std::string>{"com.other.app",
                                                              "com.samsung.ui"});
}
