// skydiver: generate synthetic nets, encode inputs, and run the accelerator
// model (single run, schedule x APRC comparison, seed sweep, profile).
//
// Exit codes: 0 ok, 2 usage, 3 data/format, 4 model/shape.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "skydiver/skydiver.hpp"

namespace fs = std::filesystem;
using namespace skydiver;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_format = 3;
constexpr int exit_model = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
    if ( const char* env = std::getenv( "SKYDIVER_OUT_DIR" ); env && *env ) return env;
    return ".";
}

// "N=4,streams=4,clusters=16,clock=200e6"; unnamed keys keep their defaults.
HwConfig parse_hw( const std::string& text ) {
    HwConfig hw;
    std::stringstream ss( text );
    std::string item;
    while ( std::getline( ss, item, ',' ) ) {
        if ( item.empty() ) continue;
        const auto eq = item.find( '=' );
        if ( eq == std::string::npos ) throw UsageError( "--hw: expected key=value, got '" + item + "'" );
        const auto key = item.substr( 0, eq );
        const auto val = item.substr( eq + 1 );
        try {
            std::size_t used = 0;
            if ( key == "clock" ) {
                hw.clock_hz = std::stod( val, &used );
            } else {
                const auto v = std::stoull( val, &used );
                if ( key == "N" || key == "spes" )
                    hw.spes_per_cluster = v;
                else if ( key == "streams" )
                    hw.streams = v;
                else if ( key == "clusters" )
                    hw.clusters = v;
                else
                    throw UsageError( "--hw: unknown key '" + key + "' (N, streams, clusters, clock)" );
            }
            if ( used != val.size() ) throw std::invalid_argument( val );
        } catch ( const std::logic_error& ) {
            throw UsageError( "--hw: bad value for " + key + ": '" + val + "'" );
        }
    }
    hw.validate();
    return hw;
}

fs::path ensure_dir( const fs::path& dir ) {
    std::error_code ec;
    fs::create_directories( dir, ec );
    if ( ec ) throw FormatError( "cannot create output directory " + dir.string() );
    return dir;
}

std::string file_safe( std::string mode ) {
    for ( auto& ch : mode )
        if ( ch == '+' ) ch = '_';
    return mode;
}

// Flags shared by the commands that consume a network and an input.
struct InputFlags {
    std::string net;
    std::string input;
    std::optional< std::size_t > timesteps;
    std::optional< std::uint64_t > seed;
    std::size_t image_index = 0;
    double intensity = 0.25;

    void add( CLI::App* cmd ) {
        cmd->add_option( "--net", net, "network description (.json) or weights blob (.skyb)" )->required();
        cmd->add_option( "--input", input, "spike trace or IDX image file; omitted: synthetic image" );
        cmd->add_option( "--timesteps,-T", timesteps, "timesteps (default 50; a trace's own)" )->check( CLI::PositiveNumber );
        cmd->add_option( "--seed", seed, "seed for encoding / synthetic input" );
        cmd->add_option( "--index", image_index, "image index in an IDX file" );
        cmd->add_option( "--intensity", intensity, "mean pixel value of the synthetic image" )->check( CLI::Range( 0.0, 1.0 ) );
    }

    InputOptions options() const {
        InputOptions o;
        if ( !input.empty() ) o.path = input;
        o.timesteps = timesteps;
        o.image_index = image_index;
        o.intensity = intensity;
        bool stochastic = input.empty();
        if ( !stochastic ) {
            const auto bytes = io::read_file( input );
            stochastic = bytes.size() >= 4 && bytes[ 0 ] == 0 && bytes[ 1 ] == 0 && bytes[ 2 ] == 8 && bytes[ 3 ] == 3;
        }
        if ( stochastic && !seed ) throw UsageError( "--seed is required when the input is encoded or synthetic" );
        o.seed = seed.value_or( 0 );
        return o;
    }
};

ScheduleOptions schedule_options( const std::string& magnitude, const std::string& negative ) {
    ScheduleOptions o;
    o.magnitude = magnitude == "abs" ? MagnitudeKind::absolute_sum : MagnitudeKind::signed_sum;
    o.negative = negative == "clamp" ? NegativePolicy::clamp_zero : NegativePolicy::absolute;
    return o;
}

void write_text( const fs::path& path, const std::string& text ) {
    io::write_file_atomic( path, text );
    std::cerr << "wrote " << path.string() << "\n";
}

} // namespace

int main( int argc, char** argv ) {
    CLI::App app{ "Spiking accelerator model: APRC, CBWS scheduling and cycle accounting" };
    app.require_subcommand( 1 );
    app.fallthrough();
    std::string out_dir = default_out_dir().string();
    app.add_option( "--out-dir", out_dir, "output directory (default $SKYDIVER_OUT_DIR or .)" );

    // gen
    auto* gen = app.add_subcommand( "gen", "generate a random network from a layer spec" );
    std::string gen_layers, gen_out, gen_name = "synthetic";
    std::uint64_t gen_seed = 0;
    GenerateOptions gen_opts;
    gen->add_option( "--layers", gen_layers, "layer spec, e.g. 16x16x3-8C3-16C3-32C3" )->required();
    gen->add_option( "--seed", gen_seed, "weight seed" )->required();
    gen->add_option( "--out", gen_out, "output path (.json or .skyb); default <out-dir>/net.json" );
    gen->add_option( "--sigma", gen_opts.weight_sigma, "weight standard deviation" );
    gen->add_option( "--mean", gen_opts.weight_mean, "weight mean" );
    gen->add_option( "--vth", gen_opts.v_th, "firing threshold" );
    gen->add_option( "--input-side", gen_opts.input_side, "input side when the spec has no input token" );
    gen->add_option( "--input-channels", gen_opts.input_channels, "input channels when the spec has no input token" );
    gen->add_option( "--name", gen_name, "network name" );

    // encode
    auto* enc = app.add_subcommand( "encode", "rate-code an image into a spike trace" );
    InputFlags enc_in;
    std::string enc_out;
    enc_in.add( enc );
    enc->add_option( "--out", enc_out, "trace path; default <out-dir>/input.trace" );

    // run
    auto* run = app.add_subcommand( "run", "simulate one schedule and write its report" );
    InputFlags run_in;
    std::string run_schedule = "cbws", run_aprc = "on", run_hw, magnitude = "signed", negative = "abs";
    run_in.add( run );
    run->add_option( "--schedule", run_schedule, "baseline or cbws" )->check( CLI::IsMember( { "baseline", "cbws" } ) );
    run->add_option( "--aprc", run_aprc, "apply APRC before running" )->check( CLI::IsMember( { "on", "off" } ) );
    run->add_option( "--hw", run_hw, "hardware, e.g. N=4,streams=4,clusters=16,clock=200e6" );
    run->add_option( "--magnitude", magnitude, "filter magnitude: signed or abs" )->check( CLI::IsMember( { "signed", "abs" } ) );
    run->add_option( "--negative", negative, "negative magnitudes: abs or clamp" )->check( CLI::IsMember( { "abs", "clamp" } ) );

    // compare
    auto* cmp = app.add_subcommand( "compare", "baseline vs cbws, with and without APRC" );
    InputFlags cmp_in;
    std::string cmp_hw, cmp_aprc = "on";
    bool cmp_matrix = false;
    cmp_in.add( cmp );
    cmp->add_flag( "--matrix", cmp_matrix, "run all four schedule x APRC modes" );
    cmp->add_option( "--aprc", cmp_aprc, "APRC setting without --matrix" )->check( CLI::IsMember( { "on", "off" } ) );
    cmp->add_option( "--hw", cmp_hw, "hardware, e.g. N=4,streams=4" );
    cmp->add_option( "--magnitude", magnitude, "filter magnitude: signed or abs" )->check( CLI::IsMember( { "signed", "abs" } ) );
    cmp->add_option( "--negative", negative, "negative magnitudes: abs or clamp" )->check( CLI::IsMember( { "abs", "clamp" } ) );

    // sweep
    auto* swp = app.add_subcommand( "sweep", "four-mode comparison over seeded synthetic nets" );
    SweepConfig sweep_cfg;
    std::string swp_hw;
    swp->add_option( "--layers", sweep_cfg.topology, "layer spec" );
    swp->add_option( "--seeds", sweep_cfg.seeds, "number of seeds" )->check( CLI::PositiveNumber );
    swp->add_option( "--seed", sweep_cfg.first_seed, "first seed" );
    swp->add_option( "--timesteps,-T", sweep_cfg.timesteps, "timesteps" )->check( CLI::PositiveNumber );
    swp->add_option( "--intensity", sweep_cfg.intensity, "mean pixel value" )->check( CLI::Range( 0.0, 1.0 ) );
    swp->add_option( "--sigma", sweep_cfg.generate.weight_sigma, "weight standard deviation" );
    swp->add_option( "--hw", swp_hw, "hardware, e.g. N=4,streams=4" );

    // profile
    auto* prof = app.add_subcommand( "profile", "per-layer spikerates and per-channel spike statistics" );
    InputFlags prof_in;
    std::string prof_aprc = "off";
    prof_in.add( prof );
    prof->add_option( "--aprc", prof_aprc, "apply APRC before profiling" )->check( CLI::IsMember( { "on", "off" } ) );

    try {
        app.parse( argc, argv );
    } catch ( const CLI::ParseError& e ) {
        const int code = app.exit( e );
        return code == 0 ? 0 : exit_usage;
    }

    try {
        const fs::path out = out_dir;

        if ( *gen ) {
            gen_opts.name = gen_name;
            const auto net = generate_network( parse_topology( gen_layers ), gen_seed, gen_opts );
            const fs::path path = gen_out.empty() ? ensure_dir( out ) / "net.json" : fs::path( gen_out );
            if ( path.has_parent_path() ) ensure_dir( path.parent_path() );
            io::save_network( net, path );
            const auto [ json, blob ] = io::network_paths( path );
            std::cerr << "wrote " << json.string() << " and " << blob.string() << "\n";
            std::printf( "%zu layers\n", net.layers.size() );
        } else if ( *enc ) {
            const auto net = io::load_network( enc_in.net );
            const auto train = load_input( net, enc_in.options() );
            const fs::path path = enc_out.empty() ? ensure_dir( out ) / "input.trace" : fs::path( enc_out );
            io::save_spike_trace( train, path );
            std::cerr << "wrote " << path.string() << "\n";
            std::printf( "spikerate %.6f\n", train.spikerate() );
        } else if ( *run ) {
            const auto hw = parse_hw( run_hw );
            auto net = io::load_network( run_in.net );
            const auto input = load_input( net, run_in.options() );
            const ModeSpec spec{ run_schedule == "cbws", run_aprc == "on" };
            const auto r = run_compare( net, input, hw, { spec }, schedule_options( magnitude, negative ),
                                        run_in.seed.value_or( 0 ) );
            const auto& mr = r.runs.front();
            const auto dir = ensure_dir( out );
            const auto stem = "run_" + file_safe( mr.report.mode );
            write_text( dir / ( stem + ".json" ), io::format_report( mr.report, io::ReportFormat::json ) );
            write_text( dir / ( stem + ".csv" ), io::format_report( mr.report, io::ReportFormat::csv ) );
            write_text( dir / ( stem + "_schedule.json" ), io::schedule_to_json( mr.schedule ).dump( 2 ) + "\n" );
            std::printf( "mode %s\nmean_balance_ratio %s\ntotal_cycles %llu\n", mr.report.mode.c_str(),
                         io::fixed6( mean_balance_ratio( mr.report ) ).c_str(),
                         static_cast< unsigned long long >( mr.report.total_cycles() ) );
        } else if ( *cmp ) {
            const auto hw = parse_hw( cmp_hw );
            const auto net = io::load_network( cmp_in.net );
            const auto input = load_input( net, cmp_in.options() );
            std::vector< ModeSpec > modes;
            if ( cmp_matrix )
                modes.assign( matrix_modes.begin(), matrix_modes.end() );
            else
                modes = { { false, cmp_aprc == "on" }, { true, cmp_aprc == "on" } };
            const auto r = run_compare( net, input, hw, modes, schedule_options( magnitude, negative ),
                                        cmp_in.seed.value_or( 0 ) );
            const auto dir = ensure_dir( out );
            write_text( dir / "compare.csv", compare_csv( r ) );
            const auto summary = compare_summary_csv( r );
            write_text( dir / "compare_summary.csv", summary );
            std::fputs( summary.c_str(), stdout );
        } else if ( *swp ) {
            sweep_cfg.hw = parse_hw( swp_hw );
            const auto rows = run_sweep( sweep_cfg );
            const auto dir = ensure_dir( out );
            const auto text = sweep_csv( rows );
            write_text( dir / "sweep.csv", text );
            std::fputs( text.c_str(), stdout );
        } else if ( *prof ) {
            auto net = io::load_network( prof_in.net );
            if ( prof_aprc == "on" ) net = apply_aprc( net );
            const auto input = load_input( net, prof_in.options() );
            const auto p = profile_network( net, input );
            const auto dir = ensure_dir( out );
            const auto layers = profile_layers_csv( p );
            write_text( dir / "profile_layers.csv", layers );
            write_text( dir / "profile_channels.csv", profile_channels_csv( p ) );
            std::fputs( layers.c_str(), stdout );
        }
    } catch ( const UsageError& e ) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch ( const FormatError& e ) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_format;
    } catch ( const Error& e ) {
        std::cerr << "model error: " << e.what() << "\n";
        return exit_model;
    }
    return 0;
}
