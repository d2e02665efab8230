#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "skydiver/conv.hpp"
#include "skydiver/encode.hpp"
#include "skydiver/forward.hpp"
#include "skydiver/lif.hpp"

using namespace skydiver;

TEST( Lif, ZeroInputStaysSilent ) {
    const auto r = lif_step( 0.0f, 0.0f, 1.0f );
    EXPECT_EQ( r.vmem, 0.0f );
    EXPECT_FALSE( r.spiked );
}

TEST( Lif, FiresAndSubtracts ) {
    const auto r = lif_step( 0.6f, 0.5f, 1.0f );
    EXPECT_TRUE( r.spiked );
    EXPECT_NEAR( r.vmem, 0.1f, 1e-6 );
}

TEST( Lif, ThresholdTieFires ) {
    EXPECT_TRUE( lif_step( 0.5f, 0.5f, 1.0f ).spiked );
    EXPECT_EQ( lif_step( 0.5f, 0.5f, 1.0f ).vmem, 0.0f );
}

// Constant 0.3 drive: spikes at steps 4, 7, 10 by scalar iteration in double.
TEST( Lif, ConstantDriveSpikeTimes ) {
    std::vector< int > expected;
    double v = 0.0;
    for ( int step = 1; step <= 10; ++step ) {
        v += 0.3;
        if ( v >= 1.0 - 1e-9 ) {
            expected.push_back( step );
            v -= 1.0;
        }
    }
    ASSERT_EQ( expected, ( std::vector< int >{ 4, 7, 10 } ) );

    std::vector< int > got;
    float vm = 0.0f;
    for ( int step = 1; step <= 10; ++step ) {
        const auto r = lif_step( vm, 0.3f, 1.0f );
        vm = r.vmem;
        if ( r.spiked ) got.push_back( step );
    }
    EXPECT_EQ( got, expected );
}

TEST( Lif, RejectsNonFinite ) {
    EXPECT_THROW( lif_step( NAN, 0.0f, 1.0f ), NumericError );
    EXPECT_THROW( lif_step( 0.0f, INFINITY, 1.0f ), NumericError );
    EXPECT_THROW( lif_step( 0.0f, 0.0f, 0.0f ), NumericError );
}

TEST( Lif, MonotoneInDrive ) {
    Rng rng( 5 );
    for ( int i = 0; i < 2000; ++i ) {
        const float vm = static_cast< float >( rng.uniform() * 2 - 1 );
        const float z = static_cast< float >( rng.uniform() * 2 - 1 );
        const float dz = static_cast< float >( rng.uniform() );
        if ( lif_step( vm, z, 1.0f ).spiked ) {
            EXPECT_TRUE( lif_step( vm, z + dz, 1.0f ).spiked );
        }
    }
}

TEST( Lif, ConservationOverRandomTraces ) {
    Rng rng( 17 );
    for ( int trace = 0; trace < 200; ++trace ) {
        float vm = 0.0f;
        double zsum = 0.0, zabs = 0.0;
        int spikes = 0;
        for ( int t = 0; t < 100; ++t ) {
            const float z = static_cast< float >( rng.uniform() * 0.8 - 0.2 );
            zsum += z;
            zabs += std::fabs( z );
            const auto r = lif_step( vm, z, 1.0f );
            vm = r.vmem;
            spikes += r.spiked;
        }
        EXPECT_LE( std::fabs( zsum - ( vm + spikes ) ), 1e-6 * zabs * 10 );
    }
}

TEST( Conv, DeltaInputGivesReversedFilter ) {
    auto L = make_conv_layer( 1, 1, 3, 1, 2, 1 );
    for ( int q = 0; q < 9; ++q ) L.weights.data[ q ] = static_cast< float >( q + 1 );
    const std::vector< std::uint8_t > frame{ 1 };
    const auto dv = conv_dv( frame, L );
    ASSERT_EQ( dv.size(), 9u );
    for ( int x = 0; x < 3; ++x )
        for ( int y = 0; y < 3; ++y ) EXPECT_EQ( dv[ x * 3 + y ], L.weights.at( 0, 0, 2 - x, 2 - y ) );
}

TEST( Conv, ZeroFrameGivesZero ) {
    auto L = make_conv_layer( 2, 3, 3, 5, 1, 1 );
    Rng rng( 1 );
    oracle::fill_uniform( rng, L.weights.data, 1.0 );
    const auto dv = conv_dv( std::vector< std::uint8_t >( L.input_size(), 0 ), L );
    for ( float v : dv ) EXPECT_EQ( v, 0.0f );
}

TEST( Conv, SixSpikesThroughUniformFilter ) {
    auto L = make_conv_layer( 1, 1, 3, 8, 2, 1 );
    std::fill( L.weights.data.begin(), L.weights.data.end(), 0.3f );
    std::vector< std::uint8_t > frame( 64, 0 );
    for ( int p : { 3 * 8 + 2, 3 * 8 + 3, 3 * 8 + 4, 4 * 8 + 2, 4 * 8 + 3, 4 * 8 + 4 } ) frame[ p ] = 1;
    const auto dv = conv_dv( frame, L );
    double sum = 0.0;
    for ( float v : dv ) sum += v;
    EXPECT_NEAR( sum, 16.2, 1e-5 );
}

TEST( Conv, RejectsShapeMismatchAndNonBinary ) {
    auto L = make_conv_layer( 1, 1, 3, 4, 1, 1 );
    EXPECT_THROW( conv_dv( std::vector< std::uint8_t >( 15, 0 ), L ), ConfigError );
    std::vector< std::uint8_t > f( 16, 0 );
    f[ 3 ] = 2;
    EXPECT_THROW( conv_dv( f, L ), ConfigError );
}

// 200 random small instances against the gather-form oracle. Summation order
// matches, so results are expected to be identical, not just close.
TEST( Conv, MatchesNaiveOracle ) {
    Rng rng( 2024 );
    for ( int inst = 0; inst < 200; ++inst ) {
        const std::size_t C = 1 + rng.below( 4 ), M = 1 + rng.below( 4 ), R = 1 + rng.below( 3 );
        const std::size_t H = std::max< std::size_t >( R, 1 + rng.below( 8 ) );
        const std::size_t pad = rng.below( R ), stride = 1 + rng.below( 2 );
        auto L = make_conv_layer( C, M, R, H, pad, stride );
        oracle::fill_uniform( rng, L.weights.data, 1.0 );
        const auto frame = oracle::random_frame( rng, L.input_size(), 0.3 );
        const auto got = conv_dv( frame, L );
        const auto want = oracle::conv_dv( frame, L );
        ASSERT_EQ( got.size(), want.size() );
        for ( std::size_t p = 0; p < got.size(); ++p ) ASSERT_LE( std::fabs( got[ p ] - want[ p ] ), 1e-6 ) << inst;
        EXPECT_EQ( got, want );
    }
}

TEST( LayerForward, ZeroFrameLeavesStateAlone ) {
    auto L = make_conv_layer( 2, 2, 3, 4, 1, 1 );
    Rng rng( 3 );
    oracle::fill_uniform( rng, L.weights.data, 1.0 );
    auto st = NeuronState::zeros( L );
    st.vmem[ 5 ] = 0.25f;
    const auto out = layer_forward( L, std::vector< std::uint8_t >( L.input_size(), 0 ), st );
    EXPECT_EQ( out.state, st );
    for ( auto b : out.out_frame ) EXPECT_EQ( b, 0 );
}

TEST( LayerForward, BitIdenticalToScalarReference ) {
    Rng rng( 99 );
    for ( int inst = 0; inst < 50; ++inst ) {
        auto L = make_conv_layer( 2, 3, 3, 4, 1, 1, 0.7f );
        oracle::fill_uniform( rng, L.weights.data, 1.0 );
        oracle::fill_uniform( rng, L.bias, 0.1 );
        auto state = NeuronState::zeros( L );
        std::vector< float > ref_v( L.output_size(), 0.0f );
        for ( int t = 0; t < 6; ++t ) {
            const auto frame = oracle::random_frame( rng, L.input_size(), 0.4 );
            const auto got = layer_forward( L, frame, state );
            const auto want = oracle::layer_step( L, frame, ref_v );
            ASSERT_EQ( got.out_frame, want.spikes );
            ASSERT_EQ( got.state.vmem, want.vmem );
            state = got.state;
            ref_v = want.vmem;
        }
    }
}

TEST( LayerForward, OutputIsBinary ) {
    Rng rng( 8 );
    auto L = make_conv_layer( 3, 4, 3, 6, 1, 1, 0.3f );
    oracle::fill_uniform( rng, L.weights.data, 1.0 );
    auto st = NeuronState::zeros( L );
    for ( int t = 0; t < 10; ++t ) {
        auto r = layer_forward( L, oracle::random_frame( rng, L.input_size(), 0.5 ), st );
        for ( auto b : r.out_frame ) ASSERT_LE( b, 1 );
        st = r.state;
    }
}

TEST( LayerForward, RejectsWrongState ) {
    auto L = make_conv_layer( 1, 1, 3, 4, 1, 1 );
    EXPECT_THROW( layer_forward( L, std::vector< std::uint8_t >( 16, 0 ), NeuronState{ { 0.0f } } ), ConfigError );
}

TEST( NetworkForward, SilentInputSilentNet ) {
    NetworkSpec net{ "n", { make_conv_layer( 1, 2, 3, 5, 1, 1 ), make_conv_layer( 2, 2, 3, 5, 1, 1 ) } };
    Rng rng( 4 );
    for ( auto& l : net.layers ) oracle::fill_uniform( rng, l.weights.data, 1.0 );
    const auto r = network_forward( net, SpikeTrain( 1, { 1, 5, 5 } ) );
    for ( const auto& c : r.counts ) EXPECT_EQ( c.total(), 0u );
}

TEST( NetworkForward, PassThroughNet ) {
    auto L = make_conv_layer( 1, 1, 1, 6, 0, 1, 1.0f );
    L.weights.data[ 0 ] = 1.0f;
    NetworkSpec net{ "id", { L } };
    Rng rng( 6 );
    const auto in = SpikeTrain::from_bits( 5, { 1, 6, 6 }, oracle::random_frame( rng, 5 * 36, 0.3 ) );
    const auto r = network_forward( net, in );
    EXPECT_EQ( r.trains[ 0 ], in );
}

TEST( NetworkForward, EqualsStepwiseComposition ) {
    Rng rng( 12 );
    NetworkSpec net{ "two", { make_conv_layer( 2, 3, 3, 6, 1, 1, 0.8f ), make_conv_layer( 3, 2, 3, 6, 0, 1, 0.8f ) } };
    for ( auto& l : net.layers ) oracle::fill_uniform( rng, l.weights.data, 1.0 );
    const auto in = SpikeTrain::from_bits( 8, { 2, 6, 6 }, oracle::random_frame( rng, 8 * 72, 0.4 ) );
    const auto r = network_forward( net, in );

    std::vector< std::vector< float > > v{ std::vector< float >( net.layers[ 0 ].output_size(), 0.0f ),
                                           std::vector< float >( net.layers[ 1 ].output_size(), 0.0f ) };
    for ( std::size_t t = 0; t < 8; ++t ) {
        std::vector< std::uint8_t > frame( in.frame( t ).begin(), in.frame( t ).end() );
        for ( std::size_t l = 0; l < 2; ++l ) {
            auto o = oracle::layer_step( net.layers[ l ], frame, v[ l ] );
            v[ l ] = o.vmem;
            frame = o.spikes;
            const auto got = r.trains[ l ].frame( t );
            ASSERT_TRUE( std::equal( got.begin(), got.end(), frame.begin() ) ) << "t=" << t << " l=" << l;
        }
    }
    EXPECT_EQ( r.final_states[ 1 ].vmem, v[ 1 ] );
    EXPECT_EQ( r.counts[ 0 ], channel_counts( r.trains[ 0 ] ) );
}

TEST( NetworkForward, ShapeMismatchFailsBeforeRunning ) {
    NetworkSpec net{ "bad", { make_conv_layer( 1, 2, 3, 5, 1, 1 ), make_conv_layer( 3, 2, 3, 5, 1, 1 ) } };
    EXPECT_THROW( network_forward( net, SpikeTrain( 1, { 1, 5, 5 } ) ), ConfigError );
    NetworkSpec ok{ "ok", { make_conv_layer( 1, 2, 3, 5, 1, 1 ) } };
    EXPECT_THROW( network_forward( ok, SpikeTrain( 1, { 1, 4, 4 } ) ), ConfigError );
}

TEST( Network, ValidationRejectsBadLayers ) {
    auto L = make_conv_layer( 1, 1, 3, 4, 3, 1 );
    EXPECT_THROW( validate_layer( L ), ConfigError );
    L = make_conv_layer( 1, 1, 3, 4, 1, 1, 0.0f );
    EXPECT_THROW( validate_layer( L ), NumericError );
    L = make_conv_layer( 1, 1, 3, 4, 1, 1 );
    L.weights.data[ 0 ] = NAN;
    EXPECT_THROW( validate_layer( L ), NumericError );
    EXPECT_THROW( validate_network( NetworkSpec{} ), ConfigError );
}

TEST( Encode, ExtremesAndDeterminism ) {
    Image img( { 1, 1, 2 } );
    img.pixels = { 0.0f, 1.0f };
    const auto tr = rate_encode( img, 40, 7 );
    std::size_t a = 0, b = 0;
    for ( std::size_t t = 0; t < 40; ++t ) {
        a += tr.at( t, 0, 0, 0 );
        b += tr.at( t, 0, 0, 1 );
    }
    EXPECT_EQ( a, 0u );
    EXPECT_EQ( b, 40u );
    EXPECT_EQ( rate_encode( img, 40, 7 ), tr );
}

TEST( Encode, BinomialBand ) {
    Image img( { 1, 1, 1 }, 0.5f );
    const auto tr = rate_encode( img, 1000, 123 );
    EXPECT_GE( tr.spike_count(), 430u );
    EXPECT_LE( tr.spike_count(), 570u );
}

TEST( Encode, ZeroTimestepsRejected ) {
    EXPECT_THROW( rate_encode( Image( { 1, 2, 2 }, 0.5f ), 0, 1 ), ConfigError );
}

TEST( Encode, PixelsClamped ) {
    Image img( { 1, 1, 2 } );
    img.pixels = { -3.0f, 7.0f };
    const auto tr = rate_encode( img, 20, 1 );
    for ( std::size_t t = 0; t < 20; ++t ) {
        EXPECT_EQ( tr.at( t, 0, 0, 0 ), 0 );
        EXPECT_EQ( tr.at( t, 0, 0, 1 ), 1 );
    }
}

TEST( SpikeTrain, FromBitsValidates ) {
    EXPECT_THROW( SpikeTrain::from_bits( 1, { 1, 1, 2 }, { 0 } ), ConfigError );
    EXPECT_THROW( SpikeTrain::from_bits( 1, { 1, 1, 2 }, { 0, 2 } ), ConfigError );
    EXPECT_DOUBLE_EQ( SpikeTrain::from_bits( 2, { 1, 1, 2 }, { 0, 1, 1, 1 } ).spikerate(), 0.75 );
}
