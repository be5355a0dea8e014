#include "doctest.h"

#include <set>

#include "droidmark/susi_catalog.hpp"

using namespace droidmark;

TEST_CASE("taxonomy has 17 source rows and 19 sink rows, as printed") {
    CHECK(source_categories().size() == 17);
    CHECK(sink_categories().size() == 19);

    // misspelling and duplicated rows are preserved
    CHECK(sink_categories()[5] == "LOCATTON_INFORMATION");
    CHECK(sink_categories()[0] == "PHONE_CONNECTION");
    CHECK(sink_categories()[1] == "PHONE_CONNECTION");
    CHECK(sink_categories()[7] == "SYNCHRONIZATION_DATA");
    CHECK(sink_categories()[15] == "SYNCHRONIZATION_DATA");

    CHECK(source_categories()[5] == "UNIQUE_IDENTIFIER");
    CHECK(source_categories()[8] == "SMS_MMS");
    CHECK(sink_categories()[9] == "SMS_MMS");

    std::set<std::string> distinct_sources(source_categories().begin(),
                                           source_categories().end());
    CHECK(distinct_sources.size() == 17);
    std::set<std::string> distinct_sinks(sink_categories().begin(), sink_categories().end());
    CHECK(distinct_sinks.size() == 17); // two duplicated names

    CHECK(normalized_category("LOCATTON_INFORMATION") == "LOCATION_INFORMATION");
    CHECK(normalized_category("SMS_MMS") == "SMS_MMS");

    // duplicated names map to their first row
    CHECK(sink_category_index("PHONE_CONNECTION") == 0);
    CHECK(sink_category_index("SYNCHRONIZATION_DATA") == 7);
    CHECK(sink_category_index("SMS_MMS") == 9);
    CHECK(source_category_index("UNIQUE_IDENTIFIER") == 5);
}

TEST_CASE("parse_catalog handles the degenerate and single-entry cases") {
    CHECK(parse_catalog("").size() == 0);
    CHECK(parse_catalog("# only a comment\n\n").size() == 0);

    SourceSinkCatalog c = parse_catalog(
        "android.telephony.TelephonyManager.getDeviceId\tSOURCE\tUNIQUE_IDENTIFIER\n");
    CHECK(c.size() == 1);
    Classification cls = c.classify("android.telephony.TelephonyManager.getDeviceId");
    REQUIRE(cls.source_category.has_value());
    CHECK(*cls.source_category == "UNIQUE_IDENTIFIER");
    CHECK(!cls.sink_category.has_value());
}

TEST_CASE("catalog load errors") {
    CHECK_THROWS_AS(parse_catalog("a.b.c\tSOURCE\tPHONE_BOOK\n"), UnknownCategory);
    // sink-only category is invalid for a source and vice versa
    CHECK_THROWS_AS(parse_catalog("a.b.c\tSOURCE\tLOG\n"), UnknownCategory);
    CHECK_THROWS_AS(parse_catalog("a.b.c\tSINK\tIMAGE\n"), UnknownCategory);
    CHECK_THROWS_AS(parse_catalog("a.b.c\tSOURCE\tEMAIL\na.b.c\tSOURCE\tIMAGE\n"),
                    DuplicateEntry);
    CHECK_THROWS_AS(parse_catalog("just one field\n"), MalformedLine);
    CHECK_THROWS_AS(parse_catalog("a.b\tNEITHER\tEMAIL\n"), MalformedLine);

    try {
        parse_catalog("# comment\nok.sig\tSOURCE\tEMAIL\nbroken line\n");
        FAIL("expected MalformedLine");
    } catch (const MalformedLine &e) {
        CHECK(e.line_no == 3);
    }
}

TEST_CASE("classify returns zero, one or both roles") {
    const SourceSinkCatalog &c = builtin_catalog();

    Classification none = c.classify("java.lang.Math.abs");
    CHECK(!none.source_category.has_value());
    CHECK(!none.sink_category.has_value());

    Classification sink = c.classify("android.telephony.SmsManager.sendTextMessage");
    CHECK(!sink.source_category.has_value());
    REQUIRE(sink.sink_category.has_value());
    CHECK(*sink.sink_category == "SMS_MMS");

    SourceSinkCatalog dual = parse_catalog("x.y.z\tSOURCE\tEMAIL\nx.y.z\tSINK\tLOG\n");
    Classification both = dual.classify("x.y.z");
    REQUIRE(both.source_category.has_value());
    REQUIRE(both.sink_category.has_value());
    CHECK(*both.source_category == "EMAIL");
    CHECK(*both.sink_category == "LOG");
}

TEST_CASE("builtin catalog covers every category and survives a round trip") {
    const SourceSinkCatalog &c = builtin_catalog();
    CHECK(c.size() >= 40);

    std::set<std::string> source_cats, sink_cats;
    for (const auto &[sig, cat] : c.sources()) source_cats.insert(cat);
    for (const auto &[sig, cat] : c.sinks()) sink_cats.insert(cat);
    CHECK(source_cats.size() == 17);
    CHECK(sink_cats.size() == 17); // every distinct sink name covered

    CHECK(parse_catalog(emit_catalog(c)) == c);
}
