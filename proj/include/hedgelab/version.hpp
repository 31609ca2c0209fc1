#pragma once

#define HEDGELAB_VERSION "0.1.0"
