#include "doctest.h"

#include <fstream>
#include <sstream>

#include "droidmark/arff.hpp"
#include "droidmark/event_sim.hpp"
#include "droidmark/rng.hpp"

using namespace droidmark;

namespace {

std::string read_fixture(const std::string &name) {
    std::ifstream in(std::string(FIXTURES_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("golden sample file parses exactly") {
    Dataset ds = parse_arff(read_fixture("eliteDATA.arff"));
    CHECK(ds.relation == "RunningProcessVectors");
    REQUIRE(ds.attributes.size() == 7);
    CHECK(ds.attributes[0].name == "ProcessName");
    CHECK(ds.attributes[0].values.size() == 8);
    // both spellings appear verbatim
    CHECK(ds.attributes[0].values[5] == "android.telephony.SMSManager");
    CHECK(ds.attributes[4].name == "android.telephony.SmsManager");
    for (int i = 1; i <= 5; ++i) {
        CHECK(ds.attributes[i].values == std::vector<std::string>{"0", "1"});
    }
    CHECK(ds.attributes[6].name == "Class");
    CHECK(ds.attributes[6].values == std::vector<std::string>{"Regular", "Malicious"});

    REQUIRE(ds.rows.size() == 22);
    for (const auto &row : ds.rows) {
        CHECK(row.size() == 7);
        CHECK(row[6] == kUnknownValue);
    }
    CHECK(ds.rows[0][0] == 0); // com.samsung.ui
    CHECK(ds.rows[3][4] == 1);

    SUBCASE("emit -> parse round trips exactly") {
        Dataset again = parse_arff(emit_arff(ds));
        CHECK(again == ds);
        CHECK(emit_arff(again) == emit_arff(ds));
    }
    SUBCASE("attribute order is preserved on emit") {
        std::string text = emit_arff(ds);
        std::size_t p0 = text.find("@attribute ProcessName");
        std::size_t p1 = text.find("@attribute BootReceiver");
        std::size_t p6 = text.find("@attribute Class");
        CHECK(p0 != std::string::npos);
        CHECK(p0 < p1);
        CHECK(p1 < p6);
    }
}

TEST_CASE("header-only input gives an empty dataset") {
    Dataset ds = parse_arff("@relation r\n@attribute a {x,y}\n@data\n");
    CHECK(ds.relation == "r");
    CHECK(ds.rows.empty());

    // @data line itself may be missing as long as no rows follow
    Dataset no_data = parse_arff("@relation r\n@attribute a {x,y}\n");
    CHECK(no_data.rows.empty());
}

TEST_CASE("labeled row parses against the declared nominal set") {
    std::string text = read_fixture("eliteDATA.arff");
    text += "'com.elite.SMSReceiver',1,1,0,1,1,Malicious\n";
    Dataset ds = parse_arff(text);
    REQUIRE(ds.rows.size() == 23);
    CHECK(ds.rows.back()[6] == 1);
}

TEST_CASE("parse errors are structured") {
    CHECK_THROWS_AS(parse_arff(""), MissingHeader);
    CHECK_THROWS_AS(parse_arff("@attribute a {x}\n"), MissingHeader);
    CHECK_THROWS_AS(parse_arff("@data\n"), MissingHeader);
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a numeric\n@data\n"),
                    UnsupportedAttributeType);
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a string\n@data\n"),
                    UnsupportedAttributeType);
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a {x,y}\n@data\nz\n"),
                    UnknownNominalValue);
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a {x,y}\n@data\nx,y\n"),
                    ArityMismatch);
    CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a {x,y}\nx\n@data\n"),
                    ArffSyntaxError);

    try {
        parse_arff("@relation r\n@attribute a {x,y}\n@data\nx\nz\n");
        FAIL("expected UnknownNominalValue");
    } catch (const UnknownNominalValue &e) {
        CHECK(e.row == 2);
        CHECK(e.attribute == "a");
        CHECK(e.value == "z");
    }
}

TEST_CASE("quoting: dotted values quoted, plain tokens bare") {
    Dataset ds;
    ds.relation = "q";
    ds.attributes.push_back({"ProcessName", {"com.a.b", "plain"}});
    ds.attributes.push_back({"Class", {"Regular", "Malicious"}});
    ds.rows.push_back({0, 1});
    ds.rows.push_back({1, kUnknownValue});

    std::string text = emit_arff(ds);
    CHECK(text.find("'com.a.b'") != std::string::npos);
    CHECK(text.find("plain") != std::string::npos);
    CHECK(text.find("'plain'") == std::string::npos);
    CHECK(text.find("Malicious") != std::string::npos);
    CHECK(text.find("'Malicious'") == std::string::npos);
    CHECK(parse_arff(text) == ds);
}

TEST_CASE("unknown is distinct from every nominal value") {
    Dataset ds = parse_arff("@relation r\n@attribute a {x,'?'}\n@data\n?\n'?'\n");
    CHECK(ds.rows[0][0] == kUnknownValue);
    CHECK(ds.rows[1][0] == 1); // the quoted literal question mark
}

TEST_CASE("round trip holds for generated and random datasets") {
    Dataset generated = generate_dataset(1, 32);
    CHECK(parse_arff(emit_arff(generated)) == generated);

    Rng rng(0xA11CE);
    for (int trial = 0; trial < 1000; ++trial) {
        Dataset ds;
        ds.relation = "rel" + std::to_string(rng.below(100));
        int attrs = 1 + static_cast<int>(rng.below(5));
        for (int a = 0; a < attrs; ++a) {
            Attribute attr;
            attr.name = "attr" + std::to_string(a);
            if (rng.chance(0.2)) attr.name += ".dotted";
            int vals = 1 + static_cast<int>(rng.below(4));
            for (int v = 0; v < vals; ++v) {
                std::string value = "v" + std::to_string(v);
                switch (rng.below(4)) {
                case 0: value = "com.pkg." + value; break;
                case 1: value += " spaced"; break;
                case 2: value += ",comma"; break;
                default: break;
                }
                attr.values.push_back(value);
            }
            ds.attributes.push_back(std::move(attr));
        }
        int rows = static_cast<int>(rng.below(6));
        for (int r = 0; r < rows; ++r) {
            std::vector<int> row;
            for (int a = 0; a < attrs; ++a) {
                if (rng.chance(0.15)) row.push_back(kUnknownValue);
                else row.push_back(static_cast<int>(rng.below(ds.attributes[a].values.size())));
            }
            ds.rows.push_back(std::move(row));
        }
        CAPTURE(trial);
        Dataset again = parse_arff(emit_arff(ds));
        REQUIRE(again == ds);
    }
}

TEST_CASE("parser is total on arbitrary bytes") {
    Rng rng(0xBEEF);
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        std::size_t len = rng.below(160);
        for (std::size_t i = 0; i < len; ++i) {
            static const char pool[] = "@relationTRIBUTEdata{},'?%\n\t abc012";
            if (rng.chance(0.8)) text += pool[rng.below(sizeof(pool) - 1)];
            else text += static_cast<char>(rng.below(256));
        }
        try {
            Dataset ds = parse_arff(text);
            (void)ds;
        } catch (const Error &) {
        }
    }
}

TEST_CASE("JSON form round trips") {
    Dataset ds = generate_dataset(7, 10);
    json j = dataset_to_json(ds);
    CHECK(dataset_from_json(j) == ds);
}
