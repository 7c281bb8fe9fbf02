#include "tsn5g/qos.hpp"

#include <doctest.h>

using namespace tsn5g;

namespace {

DrbConfig config_of(std::vector<DrbEntry> entries)
{
    DrbConfig c;
    c.ue_id = 2049;
    c.entries = std::move(entries);
    return c;
}

}  // namespace

TEST_CASE("default PCP to DSCP is identity")
{
    QosProfile p;
    CHECK(map_pcp_to_dscp(p, Pcp{6}) == Dscp{6});
    CHECK(map_pcp_to_dscp(p, Pcp{0}) == Dscp{0});
    p.set_pcp_to_dscp(Pcp{3}, Dscp{26});
    CHECK(map_pcp_to_dscp(p, Pcp{3}) == Dscp{26});
}

TEST_CASE("DSCP to QFI falls back to best effort")
{
    QosProfile p;
    CHECK(map_dscp_to_qfi(p, Dscp{6}) == Qfi{6});
    CHECK(map_dscp_to_qfi(p, Dscp{0}) == Qfi{0});
    CHECK(map_dscp_to_qfi(p, Dscp{45}) == Qfi{0});
}

TEST_CASE("QFI to DRB with the two-bearer config")
{
    const auto c = two_bearer_drb_config(2049);
    CHECK(validate_drb_config(c).valid());
    CHECK(map_qfi_to_drb(c, Qfi{6}) == 1);
    CHECK(map_qfi_to_drb(c, Qfi{0}) == 0);
    CHECK(map_qfi_to_drb(c, Qfi{9}) == 0);
    CHECK(resolve_drb_entry(c, Qfi{6}).priority > resolve_drb_entry(c, Qfi{0}).priority);
}

TEST_CASE("DSCP to PCP")
{
    QosProfile p;
    CHECK(map_dscp_to_pcp(p, Dscp{6}) == Pcp{6});
    CHECK(map_dscp_to_pcp(p, Dscp{0}) == Pcp{0});
    CHECK(map_dscp_to_pcp(p, Dscp{50}) == Pcp{0});
    p.set_dscp_to_pcp(Dscp{26}, Pcp{3});
    CHECK(map_dscp_to_pcp(p, Dscp{26}) == Pcp{3});
}

TEST_CASE("DRB config validation")
{
    CHECK(validate_drb_config(config_of({{0, {Qfi{0}}, 0, false}, {1, {Qfi{6}}, 1, false}})).valid());

    const auto dup = validate_drb_config(config_of({{0, {Qfi{0}, Qfi{6}}, 0, false}, {1, {Qfi{6}}, 1, false}}));
    REQUIRE(dup.has(DrbIssue::Kind::DuplicateQfi));
    CHECK(dup.issues.size() == 1);
    CHECK(dup.issues[0].qfi == 6);
    CHECK(dup.issues[0].describe().find('6') != std::string::npos);

    CHECK(validate_drb_config(config_of({})).has(DrbIssue::Kind::MissingDefault));
    CHECK(validate_drb_config(config_of({{1, {Qfi{6}}, 1, false}})).has(DrbIssue::Kind::MissingDefault));
    CHECK(validate_drb_config(config_of({{0, {}, 0, true}})).has(DrbIssue::Kind::EmptyEntry));
    CHECK(validate_drb_config(config_of({{0, {Qfi{0}}, 0, true}, {1, {Qfi{6}}, 1, true}}))
              .has(DrbIssue::Kind::MultipleDefaults));
    CHECK(validate_drb_config(config_of({{0, {Qfi{0}}, 0, false}, {0, {Qfi{6}}, 1, false}}))
              .has(DrbIssue::Kind::DuplicateDrb));
}

TEST_CASE("an explicit default entry catches unmapped QFIs")
{
    const auto c = config_of({{0, {Qfi{0}}, 0, false}, {2, {Qfi{5}}, 0, true}});
    REQUIRE(validate_drb_config(c).valid());
    CHECK(map_qfi_to_drb(c, Qfi{9}) == 2);
    CHECK(map_qfi_to_drb(c, Qfi{0}) == 0);
}

TEST_CASE("class preservation holds for the identity profile and is detected when broken")
{
    QosProfile p;
    CHECK(p.class_preservation_violations().empty());
    p.set_pcp_to_dscp(Pcp{5}, Dscp{40});
    const auto v = p.class_preservation_violations();
    REQUIRE(v.size() == 1);
    CHECK(v[0] == Pcp{5});
    p.set_dscp_to_pcp(Dscp{40}, Pcp{5});
    CHECK(p.class_preservation_violations().empty());
}
