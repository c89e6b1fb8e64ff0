"""synthseg: deterministic synthetic segmentation datasets plus the
experiment statistics to measure what they buy."""

from .bvh import BuildSummary, SceneGeometry, build_bvh
from .config import GenerationConfig, SubjectConfig, load_config, preset_config, save_config
from .errors import (DataError, GroupMappingError, ObjParseError, ParameterError,
                     SamplingError, SynthsegError, UndefinedMetricError)
from .generate import generate_dataset
from .geometry import RigidTransform, euler_xyz, is_rotation, look_at
from .iou import SegmentationResult, mean_iou
from .manifest import (DatasetManifest, FrequencyTable, ManifestRecord, SizeGrid,
                       compute_frequency_table, nested_subsets, sample_subset,
                       split_holdout, validate_manifest)
from .meshes import VehicleParams, build_procedural_subject, box_mesh, quad_mesh, uv_sphere
from .obj_io import load_obj_subject
from .randomizer import (CameraConfig, RandomizationConfig, SkyConfig, horizontal_side,
                         preset, sample_scene, with_resolution)
from .render import (BeautyImage, ClassMask, FrameProvenance, LabeledFrame, MASK_MODES,
                     RenderSettings, render_beauty, render_class_masks, render_id_buffer,
                     render_labeled_frame)
from .reports import REPORT_FORMATS, emit_reports
from .scene import (FeatureClass, Material, Mesh, PartGroup, PhysicalCamera, SceneInstance,
                    Skybox, SubjectModel, SunLight, class_slugs, default_feature_classes)
from .sky import busy_sky_map, sample_sky
from .stats import (CellStats, ExperimentRecord, RatioSeries, RunMatrix, aggregate_matrix,
                    ci_replication_rule, compute_stats, inflection_index,
                    percent_increase, ratio_view, read_run_records, welch_statistic,
                    welch_ttest_one_sided, write_run_records)

__version__ = "0.1.0"
