// biostego: fingerprint-gated steganography.
//
//   biostego [--store DIR] [--config FILE] [--set name=value]... <command>
//
// Exit codes: 0 ok / accepted, 1 rejected, 2 usage or lookup error, 3 data error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biostego/biostego.hpp"

namespace {

using biostego::Channel;

biostego::PipelineConfig build_config(const std::string& path, const std::vector<std::string>& overrides) {
  biostego::PipelineConfig cfg = path.empty() ? biostego::PipelineConfig{} : biostego::load_config(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw biostego::Error(biostego::ErrorCode::InvalidConfig, "--set expects name=value, got '" + kv + "'");
    }
    biostego::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::string default_store() {
  const char* env = std::getenv("BIOSTEGO_STORE");
  return env && *env ? env : "biostego-store";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fingerprint-gated steganography toolkit"};
  app.require_subcommand(1);

  std::string store_dir = default_store();
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--store", store_dir, "template store directory (env BIOSTEGO_STORE)");
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one setting, name=value")->take_all();

  std::string user, fingerprint, payload, cover, bank, input, out, out_dir, channel_name = "lsb";
  std::uint64_t seed = 0;
  bool overwrite = false;
  const std::map<std::string, Channel> channels{{"lsb", Channel::Lsb}, {"list", Channel::List}};

  auto* enroll = app.add_subcommand("enroll", "enroll a fingerprint");
  enroll->add_option("--user", user)->required();
  enroll->add_option("--fingerprint", fingerprint)->required();
  enroll->add_flag("--overwrite", overwrite, "replace an existing template");

  auto* verify = app.add_subcommand("verify", "verify a fingerprint against the enrolled template");
  verify->add_option("--user", user)->required();
  verify->add_option("--fingerprint", fingerprint)->required();

  auto* send = app.add_subcommand("send", "hide a payload after verification");
  send->add_option("--user", user)->required();
  send->add_option("--fingerprint", fingerprint)->required();
  send->add_option("--channel", channel_name)->check(CLI::IsMember({"lsb", "list"}));
  send->add_option("--payload", payload)->required();
  send->add_option("--cover", cover, "cover image (lsb)");
  send->add_option("--bank", bank, "song bank (list)");
  send->add_option("--seed", seed, "title selection seed (list)");
  send->add_option("--out", out)->required();

  auto* receive = app.add_subcommand("receive", "recover a payload after verification");
  receive->add_option("--user", user)->required();
  receive->add_option("--fingerprint", fingerprint)->required();
  receive->add_option("--channel", channel_name)->check(CLI::IsMember({"lsb", "list"}));
  receive->add_option("--in", input, "stego image or cover list")->required();
  receive->add_option("--out", out)->required();

  auto* analyze = app.add_subcommand("analyze", "write every pipeline stage as an image");
  analyze->add_option("--fingerprint", fingerprint)->required();
  analyze->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : biostego::kExitUsage;
  }

  try {
    const biostego::PipelineConfig cfg = build_config(config_path, overrides);
    const biostego::TemplateStore store(store_dir);

    if (enroll->parsed()) {
      const auto s = biostego::enroll(store, user, fingerprint, cfg, overwrite);
      std::cout << "enrolled " << user << " minutiae=" << s.minutiae << " D=" << biostego::detail::fixed6(s.D) << "\n";
      return biostego::kExitOk;
    }
    if (verify->parsed()) {
      const auto r = biostego::verify(store, user, fingerprint, cfg);
      std::cout << "score=" << r.score << " accepted=" << (r.accepted ? "true" : "false") << "\n";
      return r.accepted ? biostego::kExitOk : biostego::kExitRejected;
    }
    if (send->parsed() || receive->parsed()) {
      biostego::ChannelArgs args;
      args.channel = channels.at(channel_name);
      args.out = out;
      args.seed = seed;
      const auto verifier = biostego::store_verifier(store, cfg);
      if (send->parsed()) {
        if (args.channel == Channel::Lsb && cover.empty()) throw CLI::RequiredError("--cover");
        if (args.channel == Channel::List && bank.empty()) throw CLI::RequiredError("--bank");
        args.input = payload;
        args.cover = cover;
        args.bank = bank;
        biostego::send(verifier, user, fingerprint, args);
      } else {
        args.input = input;
        biostego::receive(verifier, user, fingerprint, args);
      }
      std::cout << "wrote " << out << "\n";
      return biostego::kExitOk;
    }
    if (analyze->parsed()) {
      const auto r = biostego::analyze(fingerprint, out_dir, cfg);
      std::cout << biostego::format_report(r);
      return biostego::kExitOk;
    }
  } catch (const biostego::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return biostego::exit_code(e.code());
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return biostego::kExitUsage;
  }
  return biostego::kExitUsage;
}
