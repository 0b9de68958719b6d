#include "mdnf/mdnf.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "mdnf/expr.hpp"
#include "mdnf/pipeline.hpp"

struct mdnf_session {
  explicit mdnf_session(mdnf::RunConfig c) : session(std::move(c)) {}
  mdnf::Session session;
};

namespace {

thread_local std::string g_last_error;

mdnf_status to_status(mdnf::ErrorCode code) {
  return static_cast<mdnf_status>(static_cast<int>(code) + 1);
}

template <class Body>
mdnf_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return MDNF_OK;
  } catch (const mdnf::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return MDNF_INTERNAL_ERROR;
}

void require(const void* p, const char* what) {
  if (!p)
    throw mdnf::Error(mdnf::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mdnf::TableFormat table_format(mdnf_format f) {
  switch (f) {
    case MDNF_FORMAT_CSV: return mdnf::TableFormat::Csv;
    case MDNF_FORMAT_JSON: return mdnf::TableFormat::Json;
  }
  throw mdnf::Error(mdnf::ErrorCode::InvalidArgument, "unknown table format");
}

mdnf_check_result to_c(const mdnf::CheckResult& c) { return {c.max_err, c.tol, c.pass ? 1 : 0}; }

}  // namespace

extern "C" {

const char* mdnf_status_name(mdnf_status status) {
  if (status == MDNF_OK) return "OK";
  if (status == MDNF_INTERNAL_ERROR) return "InternalError";
  if (status > MDNF_OK && status < MDNF_INTERNAL_ERROR)
    return mdnf::error_code_name(static_cast<mdnf::ErrorCode>(static_cast<int>(status) - 1));
  return "UnknownStatus";
}

const char* mdnf_last_error(void) { return g_last_error.c_str(); }

void mdnf_string_free(char* s) { std::free(s); }

mdnf_status mdnf_session_create(const char* config_text, mdnf_session** out) {
  return guarded([&] {
    require(config_text, "config_text");
    require(out, "out");
    *out = new mdnf_session(mdnf::parse_config(config_text));
  });
}

mdnf_status mdnf_session_create_from_file(const char* path, mdnf_session** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mdnf_session(mdnf::load_config(path));
  });
}

void mdnf_session_destroy(mdnf_session* session) { delete session; }

mdnf_status mdnf_session_set_output_dir(mdnf_session* session, const char* dir) {
  return guarded([&] {
    require(session, "session");
    require(dir, "dir");
    session->session.mutable_config().output_dir = dir;
  });
}

const char* mdnf_session_output_dir(const mdnf_session* session) {
  return session ? session->session.config().output_dir.c_str() : "";
}

int mdnf_session_formats(const mdnf_session* session) {
  if (!session) return 0;
  const auto& c = session->session.config();
  return (c.format_csv ? MDNF_FORMAT_CSV : 0) | (c.format_json ? MDNF_FORMAT_JSON : 0);
}

mdnf_status mdnf_check(mdnf_session* session, mdnf_check_report* out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    const mdnf::HypothesisReport r = session->session.check();
    out->admissible = r.admissible ? 1 : 0;
    out->failure = r.failure ? to_status(*r.failure) : MDNF_OK;
    out->f00 = r.f00;
    out->fx0 = r.fx0;
    out->fy0 = r.fy0;
    out->fxx0 = r.fxx0;
    out->omega0 = r.omega0;
    out->flip_f = r.flip_f ? 1 : 0;
    out->flip_y = r.flip_y ? 1 : 0;
  });
}

mdnf_status mdnf_check_json(mdnf_session* session, char** out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    *out = dup_string(session->session.check_json());
  });
}

mdnf_status mdnf_profile(mdnf_session* session, mdnf_format format, char** table,
                         char** summary) {
  return guarded([&] {
    require(session, "session");
    require(table, "table");
    std::string s;
    const std::string t = session->session.profile_table(table_format(format), &s);
    *table = dup_string(t);
    if (summary) *summary = dup_string(s);
  });
}

mdnf_status mdnf_chart_table(mdnf_session* session, mdnf_format format, char** table) {
  return guarded([&] {
    require(session, "session");
    require(table, "table");
    *table = dup_string(session->session.chart_table(table_format(format)));
  });
}

mdnf_status mdnf_levels(mdnf_session* session, mdnf_format format, char** table) {
  return guarded([&] {
    require(session, "session");
    require(table, "table");
    *table = dup_string(session->session.levels_table(table_format(format)));
  });
}

mdnf_status mdnf_verify(mdnf_session* session, mdnf_verify_result* out, char** json) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    const mdnf::VerificationReport r = session->session.verify();
    out->symplectic = to_c(r.symplectic);
    out->functional = to_c(r.functional);
    out->boundary = to_c(r.boundary);
    out->area = to_c(r.area);
    out->lemma5 = to_c(r.lemma5);
    out->bisector = to_c(r.bisector);
    out->boundary_probe_min_q = r.boundary_probe_min_q;
    out->grid_extent = r.grid_extent;
    out->chart_radius = r.chart_radius;
    out->eps_max = r.eps_max;
    out->overall_pass = r.overall_pass ? 1 : 0;
    if (json) *json = dup_string(r.to_json() + "\n");
  });
}

mdnf_status mdnf_chart_eval(mdnf_session* session, double x, double y, double* p, double* q) {
  return guarded([&] {
    require(session, "session");
    require(p, "p");
    require(q, "q");
    const mdnf::Vec2 v = session->session.chart_at(x, y);
    *p = v[0];
    *q = v[1];
  });
}

mdnf_status mdnf_expr_eval(const char* expr, double x, double y, double* out) {
  return guarded([&] {
    require(expr, "expr");
    require(out, "out");
    *out = mdnf::ScalarExpression::parse(expr).evaluate(x, y);
  });
}

mdnf_status mdnf_expr_jet2(const char* expr, double x, double y, double out[6]) {
  return guarded([&] {
    require(expr, "expr");
    require(out, "out");
    const mdnf::Jet2 j = mdnf::ScalarExpression::parse(expr).evaluate_jet2(x, y);
    out[0] = j.v;
    out[1] = j.dx;
    out[2] = j.dy;
    out[3] = j.dxx;
    out[4] = j.dxy;
    out[5] = j.dyy;
  });
}

}  // extern "C"
