#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skydiver/io/binary.hpp"
#include "skydiver/io/network_file.hpp"
#include "skydiver/io/spike_trace.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path cli = SKYDIVER_CLI_PATH;

fs::path fresh_dir( const std::string& name ) {
    const auto d = fs::temp_directory_path() / ( "skydiver_cli_" + name );
    fs::remove_all( d );
    fs::create_directories( d );
    return d;
}

int run( const std::string& args ) {
    const std::string cmd = cli.string() + " " + args + " >/dev/null 2>&1";
    const int status = std::system( cmd.c_str() );
    return WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
}

std::string slurp( const fs::path& p ) {
    std::ifstream in( p, std::ios::binary );
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST( Cli, GenIsDeterministic ) {
    const auto d = fresh_dir( "gen" );
    ASSERT_EQ( run( "gen --layers 8x8x2-4C3-4C3 --seed 3 --out " + ( d / "a.json" ).string() ), 0 );
    ASSERT_EQ( run( "gen --layers 8x8x2-4C3-4C3 --seed 3 --out " + ( d / "b.skyb" ).string() ), 0 );
    EXPECT_EQ( slurp( d / "a.skyb" ), slurp( d / "b.skyb" ) );
    const auto net = skydiver::io::load_network( d / "a.json" );
    EXPECT_EQ( net.layers.size(), 2u );
}

TEST( Cli, GenClassificationShape ) {
    const auto d = fresh_dir( "gen2" );
    ASSERT_EQ( run( "gen --layers 28x28-16c-32c-8c --seed 1 --out " + ( d / "c.json" ).string() ), 0 );
    const auto net = skydiver::io::load_network( d / "c.json" );
    ASSERT_EQ( net.layers.size(), 3u );
    EXPECT_EQ( net.layers[ 2 ].out_channels, 8u );
}

TEST( Cli, ExitCodes ) {
    const auto d = fresh_dir( "codes" );
    EXPECT_EQ( run( "" ), 2 );
    EXPECT_EQ( run( "gen --seed 1" ), 2 );
    EXPECT_EQ( run( "gen --layers 0C3 --seed 1 --out " + ( d / "z.json" ).string() ), 4 );
    EXPECT_EQ( run( "--help" ), 0 );
    ASSERT_EQ( run( "gen --layers 6x6x1-2C3 --seed 1 --out " + ( d / "n.json" ).string() ), 0 );
    const auto net = ( d / "n.json" ).string();
    EXPECT_EQ( run( "run --net " + net + " --seed 1 --timesteps 0 --out-dir " + d.string() ), 2 );
    EXPECT_EQ( run( "run --net " + net + " --timesteps 4 --out-dir " + d.string() ), 2 );
    EXPECT_EQ( run( "run --net " + net + " --seed 1 --hw N=0 --out-dir " + d.string() ), 4 );
    EXPECT_EQ( run( "run --net " + net + " --seed 1 --hw bogus=3 --out-dir " + d.string() ), 2 );
    EXPECT_EQ( run( "run --net " + ( d / "missing.json" ).string() + " --seed 1" ), 3 );

    // Corrupt blob: data error.
    auto blob = skydiver::io::read_file( d / "n.skyb" );
    blob[ 4 ] = 255;
    skydiver::io::write_file_atomic( d / "n.skyb", blob );
    EXPECT_EQ( run( "run --net " + net + " --seed 1 --out-dir " + d.string() ), 3 );
}

TEST( Cli, RunWritesReports ) {
    const auto d = fresh_dir( "run" );
    ASSERT_EQ( run( "gen --layers 8x8x2-4C3-4C3 --seed 2 --out " + ( d / "n.json" ).string() ), 0 );
    ASSERT_EQ( run( "run --net " + ( d / "n.json" ).string() + " --seed 5 -T 10 --schedule cbws --aprc on --hw N=2,streams=4 --out-dir " +
                    d.string() ),
               0 );
    EXPECT_TRUE( fs::exists( d / "run_cbws_aprc.json" ) );
    EXPECT_TRUE( fs::exists( d / "run_cbws_aprc.csv" ) );
    EXPECT_TRUE( fs::exists( d / "run_cbws_aprc_schedule.json" ) );
    ASSERT_EQ( run( "run --net " + ( d / "n.json" ).string() + " --seed 5 -T 10 --schedule baseline --aprc on --hw N=2 --out-dir " +
                    d.string() ),
               0 );
    const auto a = nlohmann::json::parse( slurp( d / "run_cbws_aprc.json" ) );
    const auto b = nlohmann::json::parse( slurp( d / "run_baseline_aprc.json" ) );
    EXPECT_EQ( a[ "total_work" ], b[ "total_work" ] );
}

TEST( Cli, EncodeThenRunFromTrace ) {
    const auto d = fresh_dir( "enc" );
    const auto net = ( d / "n.json" ).string();
    ASSERT_EQ( run( "gen --layers 8x8x1-3C3 --seed 2 --out " + net ), 0 );
    ASSERT_EQ( run( "encode --net " + net + " --seed 9 -T 6 --out " + ( d / "in.trace" ).string() ), 0 );
    EXPECT_EQ( skydiver::io::load_spike_trace( d / "in.trace" ).timesteps(), 6u );
    EXPECT_EQ( run( "profile --net " + net + " --input " + ( d / "in.trace" ).string() + " --out-dir " + d.string() ), 0 );
    EXPECT_TRUE( fs::exists( d / "profile_layers.csv" ) );
    EXPECT_TRUE( fs::exists( d / "profile_channels.csv" ) );
}

TEST( Cli, OutDirFromEnvironment ) {
    const auto d = fresh_dir( "env" );
    const auto net = ( d / "n.json" ).string();
    ASSERT_EQ( run( "gen --layers 8x8x1-3C3 --seed 2 --out " + net ), 0 );
    const std::string cmd = "SKYDIVER_OUT_DIR=" + ( d / "out" ).string() + " " + cli.string() + " compare --matrix --net " +
                            net + " --seed 1 -T 5 >/dev/null 2>&1";
    ASSERT_EQ( std::system( cmd.c_str() ), 0 );
    EXPECT_TRUE( fs::exists( d / "out" / "compare.csv" ) );
    EXPECT_TRUE( fs::exists( d / "out" / "compare_summary.csv" ) );
}

TEST( Cli, CompareTwiceByteIdentical ) {
    const auto d = fresh_dir( "cmp" );
    const auto net = ( d / "n.json" ).string();
    ASSERT_EQ( run( "gen --layers 10x10x3-6C3-8C3 --seed 4 --out " + net ), 0 );
    ASSERT_EQ( run( "compare --matrix --net " + net + " --seed 2 -T 12 --hw N=4 --out-dir " + ( d / "a" ).string() ), 0 );
    ASSERT_EQ( run( "compare --matrix --net " + net + " --seed 2 -T 12 --hw N=4 --out-dir " + ( d / "b" ).string() ), 0 );
    EXPECT_EQ( slurp( d / "a" / "compare.csv" ), slurp( d / "b" / "compare.csv" ) );
    EXPECT_EQ( slurp( d / "a" / "compare_summary.csv" ), slurp( d / "b" / "compare_summary.csv" ) );
    EXPECT_FALSE( slurp( d / "a" / "compare.csv" ).empty() );
}
