import io
from datetime import datetime

import pandas as pd
import plotly.graph_objects as go
import streamlit as st

from verification_report import reports_to_jsonl


def reports_dataframe(reports):
    """Verification reports as a table, one row per check"""
    rows = []
    for report in reports:
        rows.append({
            "Check": report.check_id,
            "Status": "✅ pass" if report.passed else "❌ fail",
            "Residual": report.residual,
            "Failed": ", ".join(report.failed_conditions),
            "Time_ms": round(report.timing_ms, 2),
        })
    return pd.DataFrame(rows, columns=["Check", "Status", "Residual", "Failed", "Time_ms"])


def style_status_row(row):
    if row["Status"].startswith("✅"):
        return ["background-color: #d4edda; color: #155724"] * len(row)
    return ["background-color: #f8d7da; color: #721c24; font-weight: bold"] * len(row)


def display_reports(reports, title="### 🧪 Verification Results"):
    """Styled report table with pass/fail metrics and residual details"""
    if not reports:
        st.info("📝 No checks run yet.")
        return

    st.markdown(title)
    df = reports_dataframe(reports)
    st.dataframe(df.style.apply(style_status_row, axis=1), use_container_width=True)

    passed = sum(report.passed for report in reports)
    col1, col2, col3 = st.columns(3)
    with col1:
        st.metric("✅ Passed", passed)
    with col2:
        st.metric("❌ Failed", len(reports) - passed)
    with col3:
        st.metric("⏱️ Total time", f"{df['Time_ms'].sum():.1f} ms")

    for report in reports:
        if not report.passed:
            with st.expander(f"🔍 {report.check_id}"):
                st.code(report.residual)
                if report.inputs:
                    st.json(report.inputs)
        elif report.output:
            with st.expander(f"📄 {report.check_id} output"):
                st.code(report.output)


def plot_timings(reports):
    """Horizontal bar chart of check timings coloured by status"""
    df = reports_dataframe(reports)
    if df.empty:
        return
    df = df.sort_values("Time_ms")
    colors = ["#28a745" if status.startswith("✅") else "#dc3545" for status in df["Status"]]

    fig = go.Figure(go.Bar(
        x=df["Time_ms"],
        y=df["Check"],
        orientation="h",
        marker_color=colors,
        hovertemplate="<b>%{y}</b><br>%{x:.2f} ms<extra></extra>",
    ))
    fig.update_layout(
        title="Check timings",
        xaxis_title="ms",
        height=max(300, 22 * len(df)),
        margin=dict(l=10, r=10, t=40, b=10),
        showlegend=False,
    )
    st.plotly_chart(fig, use_container_width=True)


def display_polynomial(label, poly):
    st.markdown(f"**{label}** ({len(poly)} terms)")
    st.code(poly.to_text())


def display_matrix(label, matrix):
    """Matrix over the Grassmann ring as a table of entry strings"""
    st.markdown(f"**{label}**")
    rows = matrix.to_text_rows()
    df = pd.DataFrame(rows, index=range(1, len(rows) + 1), columns=range(1, len(rows[0]) + 1))
    st.dataframe(df, use_container_width=True)


def create_export_data(reports, include_timing=True):
    """JSON-lines export of the reports"""
    output = io.BytesIO()
    output.write(reports_to_jsonl(reports, include_timing).encode("utf-8"))
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    return output.getvalue(), f"bv_reports_{timestamp}.jsonl"


def handle_export_data(reports):
    if not reports:
        return
    data, filename = create_export_data(reports)
    st.download_button(
        label="📥 Download Reports (JSONL)",
        data=data,
        file_name=filename,
        mime="application/x-ndjson",
        use_container_width=True,
    )
