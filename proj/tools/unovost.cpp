// unovost command-line tool: track / eval / synth / render.
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "unovost/eval.hpp"
#include "unovost/io.hpp"
#include "unovost/pipeline.hpp"
#include "unovost/synth.hpp"

namespace {

int cmd_track(const std::string& proposals_path, const std::string& flow_dir,
              const std::string& config_path, const std::string& out_path, const std::string& debug_dir) {
    unovost::Config cfg;
    try {
        if (!config_path.empty())
            cfg = unovost::load_config(config_path);
    } catch (const unovost::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        unovost::VideoProposals video = unovost::load_proposals(proposals_path);
        std::vector<unovost::FlowField> flows;
        if (video.num_frames > 1)
            flows = unovost::load_flow_dir(flow_dir, video.num_frames, video.height, video.width);
        unovost::TrackingResult result = unovost::run_tracking(video, flows, cfg);
        if (!debug_dir.empty())
            unovost::write_debug_dump(result, debug_dir);
        unovost::write_json_atomic(unovost::track_file_to_json(result.output), out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path, const std::string& report_path) {
    try {
        unovost::TrackFile pred = unovost::load_track_file(pred_path);
        unovost::TrackFile gt = unovost::load_track_file(gt_path);
        unovost::EvalReport report = unovost::mean_j(pred, gt);
        std::cout << unovost::report_to_table(report);
        if (!report_path.empty())
            unovost::write_json_atomic(unovost::report_to_json(report), report_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    try {
        unovost::ScenarioSpec spec = unovost::load_scenario(spec_path);
        unovost::SynthOutput out = unovost::generate(spec);
        unovost::write_synth_output(out, out_dir);
    } catch (const unovost::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cmd_render(const std::string& tracks_path, const std::string& out_dir) {
    try {
        unovost::TrackFile tf = unovost::load_track_file(tracks_path);
        unovost::render_pgm(tf, out_dir);
    } catch (const unovost::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unovost: multi-object video segmentation tracking"};
    app.require_subcommand(1);

    std::string proposals_path, flow_dir, config_path, out_path, debug_dir;
    auto* track = app.add_subcommand("track", "run the full tracking pipeline");
    track->add_option("--proposals", proposals_path, "proposal JSON file")->required();
    track->add_option("--flows", flow_dir, "directory of NNNNNN.flo files");
    track->add_option("--config", config_path, "config file (defaults used when absent)");
    track->add_option("--out", out_path, "output track JSON path")->required();
    track->add_option("--debug-dir", debug_dir, "write stage-wise debug dumps here");

    std::string pred_path, gt_path, report_path;
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--pred", pred_path, "predicted track JSON")->required();
    eval->add_option("--gt", gt_path, "ground-truth track JSON")->required();
    eval->add_option("--report", report_path, "also write the report as JSON");

    std::string spec_path, synth_dir;
    auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    synth->add_option("--spec", spec_path, "scenario JSON file")->required();
    synth->add_option("--out-dir", synth_dir, "output directory")->required();

    std::string tracks_path, render_dir;
    auto* render = app.add_subcommand("render", "render a track file as per-frame PGM images");
    render->add_option("--tracks", tracks_path, "track JSON file")->required();
    render->add_option("--out-dir", render_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (track->parsed())
        return cmd_track(proposals_path, flow_dir, config_path, out_path, debug_dir);
    if (eval->parsed())
        return cmd_eval(pred_path, gt_path, report_path);
    if (synth->parsed())
        return cmd_synth(spec_path, synth_dir);
    if (render->parsed())
        return cmd_render(tracks_path, render_dir);
    return 1;
}
