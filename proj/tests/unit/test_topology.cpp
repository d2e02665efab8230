#include <gtest/gtest.h>

#include "skydiver/topology.hpp"

using namespace skydiver;

TEST( Topology, SegmentationShape ) {
    const auto t = parse_topology( "16x16x3-8C3-16C3-32C3-32C3-16C3-1C3" );
    EXPECT_EQ( t.input_side, 16u );
    EXPECT_EQ( t.input_channels, 3u );
    ASSERT_EQ( t.layers.size(), 6u );
    EXPECT_EQ( t.layers[ 5 ].filters, 1u );
    const auto net = generate_network( t, 1 );
    EXPECT_EQ( net.layers[ 0 ].in_channels, 3u );
    EXPECT_EQ( net.layers[ 5 ].output_side(), 16u );
}

TEST( Topology, ClassificationShape ) {
    const auto net = generate_network( parse_topology( "28x28-16c-32c-8c" ), 2 );
    ASSERT_EQ( net.layers.size(), 3u );
    EXPECT_EQ( net.layers[ 0 ].in_channels, 1u );
    EXPECT_EQ( net.layers[ 0 ].out_channels, 16u );
    EXPECT_EQ( net.layers[ 1 ].out_channels, 32u );
    EXPECT_EQ( net.layers[ 2 ].out_channels, 8u );
    EXPECT_EQ( net.layers[ 2 ].kernel_size, 3u );
    for ( const auto& l : net.layers ) EXPECT_EQ( l.v_th, 1.0f );
}

TEST( Topology, SuffixesAndDense ) {
    const auto t = parse_topology( "9x9-4C5p0s2-3C3" );
    EXPECT_EQ( t.layers[ 0 ].pad, 0u );
    EXPECT_EQ( t.layers[ 0 ].stride, 2u );
    const auto net = generate_network( parse_topology( "3x3-4C3p0-10" ), 1 );
    EXPECT_EQ( net.layers[ 1 ].kind, LayerKind::dense );
    EXPECT_THROW( generate_network( parse_topology( "4x4-4C3-10" ), 1 ), ConfigError );
}

TEST( Topology, Errors ) {
    EXPECT_THROW( parse_topology( "0C3" ), ConfigError );
    EXPECT_THROW( parse_topology( "8C0" ), ConfigError );
    EXPECT_THROW( parse_topology( "8x9-4C3" ), ConfigError );
    EXPECT_THROW( parse_topology( "8C3--4C3" ), ConfigError );
    EXPECT_THROW( parse_topology( "banana" ), ConfigError );
    EXPECT_THROW( parse_topology( "8x8" ), ConfigError );
    EXPECT_THROW( parse_topology( "99999999999999999999C3" ), ConfigError );
    EXPECT_THROW( generate_network( parse_topology( "8x8-9000C9-9000C9" ), 1 ), ConfigError );
}

TEST( Topology, SameSeedSameWeights ) {
    const auto t = parse_topology( "8x8x2-4C3-4C3" );
    EXPECT_EQ( generate_network( t, 7 ), generate_network( t, 7 ) );
    EXPECT_NE( generate_network( t, 7 ), generate_network( t, 8 ) );
}
