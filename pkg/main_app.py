import json
import logging
import traceback

import streamlit as st

from bvextension import (
    build_extended_space,
    build_S_BV,
    build_S_tilde,
    build_S_tot,
    build_total_space,
    gauge_fix,
    GaugeFixingFermion,
    nonconforming_terms,
)
from antibracket import check_cme, check_nilpotency
from bvtriples import (
    algebra_lemma_report,
    build_aux_triple,
    build_bv_triple,
    derivation_consistency_check,
    ko_dimension_report,
    verify_aux_action,
    verify_bv_action,
)
from cli import parse_rationals
from expression_parser import ParseError, format_univariate, parse_expression, parse_univariate
from matrixmodel import GAUGE_FIELDS, check_closed_form, classify, relations, spectral_action
from spectraltriple import check_mixed_ko, check_real_structure, triple_from_dict
from ui_components import (
    display_matrix,
    display_polynomial,
    display_reports,
    handle_export_data,
    plot_timings,
)
from verification_suites import DEFAULT_F, SUITE_DEFAULTS, run_all_suites, suite_settings

logging.basicConfig(format="%(asctime)s %(levelname)s %(name)s: %(message)s", level=logging.INFO)
logger = logging.getLogger("main_app")

# ===================================================================
# CONFIGURATION
# ===================================================================

def initialize_streamlit_config():
    """Initialize Streamlit configuration and session states"""
    st.set_page_config(
        page_title="BV Matrix Model Workbench",
        layout="wide",
        initial_sidebar_state="expanded",
        page_icon="🧮"
    )

    session_defaults = {
        'current_page': 'Model',
        'f_text': format_univariate(DEFAULT_F),
        'suite_reports': [],
        'last_reports': [],
        'suite_settings': load_suite_settings(),
    }

    for key, default_value in session_defaults.items():
        if key not in st.session_state:
            st.session_state[key] = default_value


def load_suite_settings():
    """SUITE_DEFAULTS overridden by the [suite] table of st.secrets"""
    try:
        overrides = dict(st.secrets["suite"])
    except (KeyError, FileNotFoundError):
        overrides = {}
    except Exception as e:
        st.warning(f"⚠️ Could not read suite settings from secrets: {e}")
        overrides = {}
    return suite_settings(overrides)


def current_f():
    return parse_univariate(st.session_state.f_text)

# ===================================================================
# NAVIGATION
# ===================================================================

def render_navigation():
    """Render main navigation"""
    st.sidebar.markdown("# 🧮 BV Workbench")
    st.sidebar.markdown("**U(2) matrix model** | exact arithmetic")
    st.sidebar.markdown("---")

    pages = {
        "📐 Matrix Model": "Model",
        "👻 BV Extension": "BV",
        "🔺 Spectral Triples": "Triples",
        "🧪 Verification Suite": "Suite",
    }

    selected_page = st.sidebar.radio(
        "🧭 Navigation",
        list(pages.keys()),
        index=list(pages.values()).index(st.session_state.current_page)
    )

    st.session_state.current_page = pages[selected_page]
    return st.session_state.current_page


def setup_sidebar_controls():
    """Polynomial f and suite settings"""
    with st.sidebar:
        st.markdown("---")
        st.header("⚙️ Settings")

        f_text = st.text_input("f(x) for S₀ = tr f(M)", value=st.session_state.f_text)
        try:
            parse_univariate(f_text)
            st.session_state.f_text = f_text
        except ParseError as e:
            st.error(f"❌ {e}")

        settings = st.session_state.suite_settings
        with st.expander("🎲 Suite settings"):
            for key in SUITE_DEFAULTS:
                settings[key] = st.number_input(key, min_value=0, value=int(settings[key]), step=1)

# ===================================================================
# PAGES
# ===================================================================

def render_model_page():
    f = current_f()
    S0 = spectral_action(f)

    col1, col2, col3 = st.columns(3)
    result = classify(S0)
    with col1:
        st.metric("📏 deg f", len(f) - 1)
    with col2:
        st.metric("🧩 Terms in S₀", len(S0))
    with col3:
        st.metric("🏷️ Case", result.case.value)

    display_polynomial("S₀ = tr f(M)", S0)
    if result.witness is not None:
        st.info(f"GCD witness: `{result.witness.to_text()}`")

    with st.expander("🔢 g-form Σ ρᵏ gₖ(M₄)"):
        st.json(result.to_dict())

    report, vectors = relations(S0)
    with st.expander("🔗 Relation vectors"):
        for name, vector in vectors.items():
            st.write(f"**{name}** = ({', '.join(component.to_text() for component in vector)})")

    reports = [check_closed_form(f), report]
    st.session_state.last_reports = reports
    display_reports(reports)


def render_bv_page():
    st.markdown("## 👻 Extended action S̃ = S₀ + S_BV")
    col1, col2, col3 = st.columns(3)
    with col1:
        alpha_text = st.text_input("α₁, α₂, α₃", value="1, 1, 1")
    with col2:
        beta_text = st.text_input("β", value="1")
    with col3:
        T_text = st.text_input("T(M)", value="0")

    try:
        alpha = parse_rationals(alpha_text, 3)
        beta = parse_rationals(beta_text, 1)[0]
        T = parse_expression(T_text, GAUGE_FIELDS)
        space = build_extended_space()
        S_BV = build_S_BV(alpha, beta, T, space)
    except ValueError as e:
        st.error(f"❌ {e}")
        return

    S_tilde = build_S_tilde(spectral_action(current_f()), S_BV)
    display_polynomial("S_BV", S_BV)

    inputs = {"alpha": alpha_text, "beta": beta_text, "T": T_text}
    reports = [
        check_cme(S_tilde, space.registry, check_id="bv.cme", inputs=inputs),
        check_nilpotency(S_tilde, space.registry, check_id="bv.nilpotency", inputs=inputs),
    ]
    extra = nonconforming_terms(S_BV)
    if extra:
        st.warning(f"⚠️ Non-conforming terms: `{extra.to_text()}`")

    st.markdown("### 🧷 Gauge fixing")
    psi_text = st.text_input("Ψ over the fields of X_tot", value="B1*h1 + B2*h2 + B3*h3")
    total = build_total_space(space)
    try:
        psi = GaugeFixingFermion(parse_expression(psi_text, total.registry.names))
        fixed = gauge_fix(build_S_tot(S_tilde), psi, total.registry)
        display_polynomial("S_tot restricted to Ψ", fixed)
    except ValueError as e:
        st.error(f"❌ {e}")

    st.session_state.last_reports = reports
    display_reports(reports)


def render_triples_page():
    st.markdown("## 🔺 BV spectral triples")
    bv = build_bv_triple()
    aux = build_aux_triple()

    tab1, tab2, tab3 = st.tabs(["BV triple", "Auxiliary triple", "Upload"])
    with tab1:
        display_matrix("D = [[T, R], [R*, S]]", bv.D)
        reports = [verify_bv_action(bv), derivation_consistency_check(bv)]
    with tab2:
        display_matrix("D = [[P, Q*], [Q, 0]]", aux.D)
        reports.append(verify_aux_action(aux))
    with tab3:
        uploaded = st.file_uploader("Triple JSON", type=["json"])
        ko = st.selectbox("KO-dimension", ["mixed"] + list(range(8)))
        if uploaded is not None:
            try:
                st_user = triple_from_dict(json.loads(uploaded.getvalue()), name=uploaded.name)
                if ko == "mixed":
                    reports.append(check_mixed_ko(st_user, inputs={"file": uploaded.name}))
                else:
                    reports.append(check_real_structure(st_user, ko, inputs={"file": uploaded.name}))
            except ValueError as e:
                st.error(f"❌ Invalid triple: {e}")

    reports += ko_dimension_report(bv, aux)
    reports += algebra_lemma_report(bv, aux)
    st.session_state.last_reports = reports
    display_reports(reports)


def render_suite_page():
    st.markdown("## 🧪 Seeded verification suite")
    settings = st.session_state.suite_settings
    st.caption(f"seed = {settings['seed']}, f = {st.session_state.f_text}")

    if st.button("🚀 Run all suites", use_container_width=True):
        with st.spinner("🔄 Running exact checks..."):
            st.session_state.suite_reports = run_all_suites(current_f(), settings)
        failed = [report for report in st.session_state.suite_reports if not report.passed]
        if failed:
            st.error(f"❌ {len(failed)} checks failed")
        else:
            st.success("✅ All checks passed")

    reports = st.session_state.suite_reports
    if reports:
        plot_timings(reports)
        display_reports(reports)
        handle_export_data(reports)


def main():
    """Main application entry point"""
    try:
        initialize_streamlit_config()
        current_page = render_navigation()
        setup_sidebar_controls()

        if current_page == "Model":
            st.title("📐 U(2) Matrix Model")
            render_model_page()
        elif current_page == "BV":
            st.title("👻 BV Extension")
            render_bv_page()
        elif current_page == "Triples":
            st.title("🔺 Spectral Triples")
            render_triples_page()
        elif current_page == "Suite":
            st.title("🧪 Verification Suite")
            render_suite_page()

        with st.sidebar:
            st.markdown("---")
            st.header("🔧 Status")
            last = st.session_state.last_reports
            if last:
                passed = sum(report.passed for report in last)
                st.metric("Checks on page", f"{passed}/{len(last)}")

    except Exception:
        logger.exception("application error")
        st.error("❌ Application error occurred")
        with st.expander("🔍 Error Details"):
            st.code(traceback.format_exc())

if __name__ == "__main__":
    main()
