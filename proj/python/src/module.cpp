#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "fraclap/assembly.hpp"
#include "fraclap/cluster.hpp"
#include "fraclap/error.hpp"
#include "fraclap/hmatrix.hpp"
#include "fraclap/linalg.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/study.hpp"

namespace py = pybind11;
using namespace fraclap;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_dense(const Array& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-D array");
  DenseMatrix m(a.shape(0), a.shape(1));
  if (a.size() > 0) std::memcpy(m.data().data(), a.data(), sizeof(double) * a.size());
  return m;
}

py::array_t<double> to_array(const DenseMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  if (!m.empty()) std::memcpy(out.mutable_data(), m.data().data(), sizeof(double) * m.data().size());
  return out;
}

std::vector<double> to_vector(const Array& v) {
  if (v.ndim() != 1) throw InputError("expected a 1-D array");
  return {v.data(), v.data() + v.size()};
}

py::array_t<double> points_array(std::span<const Point> pts, int dim) {
  py::array_t<double> out({pts.size(), static_cast<std::size_t>(dim)});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < dim; ++k) r(i, k) = pts[i][k];
  return out;
}

py::array_t<std::uint32_t> simplices_array(std::span<const Simplex> els, int dim) {
  const std::size_t nv = static_cast<std::size_t>(dim) + 1;
  py::array_t<std::uint32_t> out({els.size(), nv});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < els.size(); ++i)
    for (std::size_t k = 0; k < nv; ++k) r(i, k) = els[i][k];
  return out;
}

QuadratureSpec quadrature_from(const std::tuple<int, int, int>& q) {
  return {std::get<0>(q), std::get<1>(q), std::get<2>(q)};
}

LinearMap dense_map(const DenseMatrix& a, bool transposed) {
  return [&a, transposed](std::span<const double> in, std::span<double> out) {
    const auto y = transposed ? matvec_transposed(a, in) : matvec(a, in);
    std::copy(y.begin(), y.end(), out.begin());
  };
}

}  // namespace

PYBIND11_MODULE(_fraclap, m) {
  m.doc() = "Fractional Laplacian stiffness matrices and their hierarchical compression";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // Meshes.
  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("dim", &Mesh::dim)
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_elements", &Mesh::num_elements)
      .def_property_readonly("num_dofs", &Mesh::num_dofs)
      .def_property_readonly("h", &Mesh::h)
      .def_property_readonly("vertices", [](const Mesh& x) { return points_array(x.vertices(), x.dim()); })
      .def_property_readonly("elements", [](const Mesh& x) { return simplices_array(x.elements(), x.dim()); })
      .def_property_readonly("dof_vertices",
                             [](const Mesh& x) {
                               std::vector<std::size_t> v(x.num_dofs());
                               for (std::size_t j = 0; j < v.size(); ++j) v[j] = x.vertex_of_dof(j);
                               return v;
                             },
                             "Vertex index of each degree of freedom.")
      .def("to_json", [](const Mesh& x) { return to_json(x); })
      .def("__repr__", [](const Mesh& x) {
        return "<Mesh dim=" + std::to_string(x.dim()) + " elements=" + std::to_string(x.num_elements()) +
               " dofs=" + std::to_string(x.num_dofs()) + ">";
      });
  m.def("interval_mesh", &interval_mesh, py::arg("n"));
  m.def("unit_square_mesh", &unit_square_mesh, py::arg("n"));
  m.def("lshape_mesh", &lshape_mesh, py::arg("n"));
  m.def("domain_mesh", &make_domain_mesh, py::arg("domain"), py::arg("n"),
        "Mesh by name: 'interval', 'square' or 'lshape'.");
  m.def("refine", &refine, py::arg("mesh"), "Uniform red refinement.");
  m.def("mesh_from_json", &mesh_from_json, py::arg("text"));
  m.def("load_mesh", &load_mesh, py::arg("path"));
  m.def("save_mesh", &save_mesh, py::arg("path"), py::arg("mesh"));

  // Assembly.
  m.def("normalization_constant", &normalization_constant, py::arg("d"), py::arg("s"));
  m.def(
      "assemble",
      [](const Mesh& mesh, double s, std::tuple<int, int, int> quadrature, unsigned threads) {
        const auto p = FracParams::make(mesh.dim(), s);
        const auto q = quadrature_from(quadrature);
        DenseMatrix a;
        {
          py::gil_scoped_release release;
          a = assemble_stiffness(mesh, p, q, threads);
        }
        return to_array(a);
      },
      py::arg("mesh"), py::arg("s"), py::arg("quadrature") = std::make_tuple(4, 12, 8), py::arg("threads") = 0u,
      "Dense stiffness matrix of the fractional Laplacian of order s.");
  m.def(
      "entry_oracle",
      [](const Mesh& mesh, double s, std::size_t i, std::size_t j) {
        return entry_oracle(mesh, FracParams::make(mesh.dim(), s), i, j);
      },
      py::arg("mesh"), py::arg("s"), py::arg("i"), py::arg("j"),
      "Slow adaptive reference value of one stiffness entry.");
  m.def(
      "load_vector",
      [](const Mesh& mesh, const std::function<double(double, double)>& f) {
        return load_vector(mesh, [&](const Point& x) { return f(x[0], x[1]); });
      },
      py::arg("mesh"), py::arg("f"), "Right-hand side for f(x, y); y is 0 in one dimension.");

  // Dense linear algebra.
  m.def(
      "lu_invert",
      [](const Array& a) {
        const DenseMatrix d = to_dense(a);
        DenseMatrix inv;
        {
          py::gil_scoped_release release;
          inv = lu_invert(d);
        }
        return to_array(inv);
      },
      py::arg("a"));
  m.def(
      "svd",
      [](const Array& a) {
        const SVDResult r = svd(to_dense(a));
        return py::make_tuple(to_array(r.u), py::array_t<double>(r.sigma.size(), r.sigma.data()), to_array(r.v));
      },
      py::arg("a"), "Thin SVD (U, sigma, V) with A = U diag(sigma) V^T.");
  m.def(
      "truncated_svd",
      [](const Array& a, std::size_t r) {
        const LowRankFactor f = truncated_svd(to_dense(a), r);
        return py::make_tuple(to_array(f.x), to_array(f.y));
      },
      py::arg("a"), py::arg("r"), "Best rank-r factors (X, Y) with A ~ X Y^T.");

  py::class_<NormEstimate>(m, "NormEstimate")
      .def_readonly("value", &NormEstimate::value)
      .def_readonly("converged", &NormEstimate::converged)
      .def_readonly("iterations", &NormEstimate::iterations)
      .def("__float__", [](const NormEstimate& e) { return e.value; })
      .def("__repr__", [](const NormEstimate& e) {
        return "<NormEstimate value=" + std::to_string(e.value) + (e.converged ? "" : " unconverged") + ">";
      });
  m.def(
      "norm2",
      [](const Array& a, double tol, int max_iter) {
        const DenseMatrix d = to_dense(a);
        return power_norm2(dense_map(d, false), dense_map(d, true), d.rows(), d.cols(), tol, max_iter);
      },
      py::arg("a"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500, "Spectral norm by power iteration.");

  // Clustering.
  py::class_<ClusterTree>(m, "ClusterTree")
      .def_property_readonly("perm", [](const ClusterTree& t) { return t.perm; })
      .def_property_readonly("depth", &ClusterTree::depth)
      .def_property_readonly("num_nodes", [](const ClusterTree& t) { return t.nodes.size(); })
      .def_readonly("leaf_size", &ClusterTree::leaf_size);
  m.def(
      "cluster_tree", [](const Mesh& mesh, std::size_t n_leaf) { return build_cluster_tree(mesh, n_leaf); },
      py::arg("mesh"), py::arg("n_leaf") = 20);

  py::class_<BlockPartition>(m, "BlockPartition")
      .def_readonly("eta", &BlockPartition::eta)
      .def_property_readonly("num_far", &BlockPartition::num_far)
      .def_property_readonly("num_near", &BlockPartition::num_near)
      .def_property_readonly("sparsity_constant", [](const BlockPartition& p) { return sparsity_constant(p); })
      .def("to_csv", [](const BlockPartition& p, const ClusterTree& t) { return partition_csv(t, p); },
           py::arg("tree"));
  m.def("block_partition", &build_partition, py::arg("tree"), py::arg("eta") = 2.0);

  // Hierarchical matrices.
  py::class_<HMatrix>(m, "HMatrix")
      .def_readonly("n", &HMatrix::n)
      .def_readonly("rank", &HMatrix::rank)
      .def_property_readonly("storage_bytes", [](const HMatrix& h) { return storage_bytes(h); })
      .def("matvec", [](const HMatrix& h, const Array& v) { return hmatvec(h, to_vector(v)); }, py::arg("v"))
      .def("rmatvec", [](const HMatrix& h, const Array& v) { return hmatvec_transposed(h, to_vector(v)); },
           py::arg("v"))
      .def(
          "error",
          [](const HMatrix& h, const Array& dense, double tol, int max_iter) {
            return approximation_error(to_dense(dense), h, tol, max_iter);
          },
          py::arg("dense"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
          "Spectral norm of dense - H by power iteration.")
      .def("save", [](const HMatrix& h, const std::string& dir) { save_hmatrix(dir, h); }, py::arg("dir"));
  m.def(
      "compress",
      [](const Array& a, const ClusterTree& t, const BlockPartition& p, std::size_t rank, unsigned threads) {
        const DenseMatrix d = to_dense(a);
        py::gil_scoped_release release;
        return compress(d, t, p, rank, threads);
      },
      py::arg("a"), py::arg("tree"), py::arg("partition"), py::arg("rank"), py::arg("threads") = 0u,
      "Truncate every far block of a to the given rank.");
  m.def(
      "block_singular_values",
      [](const Array& a, const ClusterTree& t, const BlockPartition& p) {
        return block_singular_values(to_dense(a), t, p);
      },
      py::arg("a"), py::arg("tree"), py::arg("partition"));

  // Study.
  py::class_<StudyRecord>(m, "StudyRecord")
      .def_readonly("s", &StudyRecord::s)
      .def_readonly("eta", &StudyRecord::eta)
      .def_readonly("n_leaf", &StudyRecord::n_leaf)
      .def_readonly("n", &StudyRecord::n)
      .def_readonly("r", &StudyRecord::r)
      .def_readonly("error_2norm", &StudyRecord::error_2norm)
      .def_readonly("storage_bytes", &StudyRecord::storage_bytes)
      .def_readonly("elapsed_seconds", &StudyRecord::elapsed_seconds)
      .def(py::self == py::self)
      .def("__repr__", [](const StudyRecord& r) {
        return "<StudyRecord s=" + std::to_string(r.s) + " r=" + std::to_string(r.r) +
               " error=" + std::to_string(r.error_2norm) + ">";
      });
  m.def(
      "run_study",
      [](const std::string& domain, std::size_t refine, std::vector<double> s_values, double eta,
         std::size_t n_leaf, std::optional<std::vector<std::size_t>> ranks, unsigned threads, bool record_time,
         std::function<void(const StudyRecord&)> progress) {
        StudyConfig cfg;
        cfg.domain = domain;
        cfg.refine = refine;
        cfg.s_values = std::move(s_values);
        cfg.eta = eta;
        cfg.n_leaf = n_leaf;
        if (ranks) cfg.ranks = *ranks;
        cfg.threads = threads;
        cfg.record_time = record_time;
        std::function<void(const StudyRecord&)> cb;
        if (progress)
          cb = [&progress](const StudyRecord& r) {
            py::gil_scoped_acquire acquire;
            progress(r);
          };
        py::gil_scoped_release release;
        return run_study(cfg, cb);
      },
      py::arg("domain") = "square", py::arg("refine") = 37,
      py::arg("s_values") = std::vector<double>{0.25, 0.5, 0.75}, py::arg("eta") = 2.0, py::arg("n_leaf") = 20,
      py::arg("ranks") = py::none(), py::arg("threads") = 0u, py::arg("record_time") = false,
      py::arg("progress") = py::none(), "Error and storage of the compressed inverse for every (s, r).");
  m.def("save_study_csv", [](const std::string& path, const std::vector<StudyRecord>& r) { save_study_csv(path, r); },
        py::arg("path"), py::arg("records"));
  m.def("load_study_csv", &load_study_csv, py::arg("path"));

  py::class_<ExponentialFit>(m, "ExponentialFit")
      .def_readonly("b", &ExponentialFit::b)
      .def_readonly("c", &ExponentialFit::c)
      .def_readonly("r_squared", &ExponentialFit::r_squared)
      .def_readonly("points", &ExponentialFit::points)
      .def("__repr__", [](const ExponentialFit& f) {
        return "<ExponentialFit b=" + std::to_string(f.b) + " R2=" + std::to_string(f.r_squared) + ">";
      });
  m.def(
      "fit_exponential",
      [](const std::vector<StudyRecord>& r, double floor) { return fit_exponential(r, floor); }, py::arg("records"),
      py::arg("floor") = 1e-13, "Least-squares fit of ln(error) = c - b r^(1/3) above the floor.");
  m.def(
      "fit_by_s", [](const std::vector<StudyRecord>& r, double floor) { return fit_by_s(r, floor); },
      py::arg("records"), py::arg("floor") = 1e-13);
}
